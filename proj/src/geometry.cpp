#include "uavsem/geometry.hpp"

#include <cmath>
#include <numbers>

namespace uavsem {

void ArrayGeometry::validate() const {
    if (n_antennas < 1) throw InvalidInputError("array: n_antennas must be >= 1");
    if (!(antenna_spacing > 0)) throw InvalidInputError("array: antenna_spacing must be > 0");
    if (!(uav_height > 0)) throw InvalidInputError("array: uav_height must be > 0");
    if (!(carrier_wavelength > 0))
        throw InvalidInputError("array: carrier_wavelength must be > 0");
}

void PortLayout::validate() const {
    if (n_ports < 1) throw InvalidInputError("ports: n_ports must be >= 1");
    if (!(port_spacing > 0)) throw InvalidInputError("ports: port_spacing must be > 0");
    if (n_active < 1 || n_active > n_ports)
        throw InvalidInputError("ports: n_active must satisfy 1 <= n_active <= n_ports");
}

void PortSelection::validate(const PortLayout& layout) const {
    if (static_cast<int>(indices.size()) != layout.n_active)
        throw InvalidInputError("port selection: expected exactly n_active indices");
    int prev = 0;
    for (int r : indices) {
        if (r < 1 || r > layout.n_ports)
            throw InvalidInputError("port selection: index out of range 1..n_ports");
        if (r <= prev)
            throw InvalidInputError("port selection: indices must be strictly increasing");
        prev = r;
    }
}

PortSelection uniform_port_selection(const PortLayout& layout) {
    layout.validate();
    const int m0 = layout.n_active;
    const int m = layout.n_ports;
    std::vector<int> idx(m0);
    for (int i = 0; i < m0; ++i) {
        double target = (2.0 * (i + 1) - 1.0) * m / (2.0 * m0);
        idx[i] = static_cast<int>(std::floor(target + 0.5));
    }
    // Repair rounding collisions while staying inside 1..M.
    for (int i = 0; i < m0; ++i) {
        int lo = (i == 0) ? 1 : idx[i - 1] + 1;
        if (idx[i] < lo) idx[i] = lo;
    }
    for (int i = m0 - 1; i >= 0; --i) {
        int hi = m - (m0 - 1 - i);
        if (idx[i] > hi) idx[i] = hi;
    }
    PortSelection sel{std::move(idx)};
    sel.validate(layout);
    return sel;
}

void UserSite::validate() const {
    if (!(uncertainty_radius_sq >= 0))
        throw InvalidInputError("user: uncertainty_radius_sq must be >= 0");
    if (!position.allFinite()) throw InvalidInputError("user: position must be finite");
}

std::vector<double> antenna_offsets(const ArrayGeometry& geom) {
    geom.validate();
    std::vector<double> offsets(geom.n_antennas);
    for (int n = 0; n < geom.n_antennas; ++n)
        offsets[n] = 0.5 * (2 * n - geom.n_antennas + 1) * geom.antenna_spacing;
    return offsets;
}

std::vector<double> port_offsets(const PortLayout& layout, const PortSelection& sel) {
    layout.validate();
    sel.validate(layout);
    std::vector<double> offsets(sel.indices.size());
    for (std::size_t i = 0; i < sel.indices.size(); ++i)
        offsets[i] = 0.5 * (2 * (sel.indices[i] - 1) - layout.n_ports + 1) * layout.port_spacing;
    return offsets;
}

double path_length(const Vec2& uav_xy, const UserSite& user, double uav_height,
                   double port_offset) {
    const double dz = uav_height - port_offset;
    const double horiz = (uav_xy - user.position).norm();
    return std::sqrt(dz * dz + horiz * horiz);
}

double departure_sine(double height_gap, double path_len) {
    if (!(path_len > 0)) throw GeometryError("departure_sine: zero path length");
    return height_gap / path_len;
}

double path_difference(double path_len, double antenna_offset, double sin_theta) {
    if (!(path_len > 0)) throw GeometryError("path_difference: zero path length");
    double radicand = path_len * path_len + antenna_offset * antenna_offset +
                      2.0 * path_len * antenna_offset * sin_theta;
    // >= (L - |y|)^2 mathematically; clamp rounding dips.
    if (radicand < 0) radicand = 0;
    return std::sqrt(radicand) - path_len;
}

double channel_gain(double h0, double vertical_gap, double horizontal_dist) {
    const double dist_sq = vertical_gap * vertical_gap + horizontal_dist * horizontal_dist;
    if (!(dist_sq > 0)) throw GeometryError("channel_gain: zero propagation distance");
    return h0 / std::sqrt(dist_sq);
}

namespace {

// Fills one matrix row (one port). Phase geometry uses the nominal horizontal
// distance, the amplitude may use an inflated one.
void fill_port_row(ChannelMatrix& g, int row, double port_off, const ArrayGeometry& geom,
                   const std::vector<double>& ant_off, double horiz_phase, double horiz_ampl,
                   double h0) {
    const double height_gap = geom.uav_height - port_off;
    const double len = std::sqrt(height_gap * height_gap + horiz_phase * horiz_phase);
    const double sin_theta = departure_sine(height_gap, len);
    const double two_pi_over_lambda = 2.0 * std::numbers::pi / geom.carrier_wavelength;
    for (int n = 0; n < geom.n_antennas; ++n) {
        const double delta = path_difference(len, ant_off[n], sin_theta);
        const double gain = channel_gain(h0, geom.uav_height + ant_off[n] - port_off, horiz_ampl);
        g(row, n) = std::polar(gain, two_pi_over_lambda * delta);
    }
}

ChannelMatrix channel_kernel(const ArrayGeometry& geom, const PortLayout& layout,
                             const PortSelection& sel, const Vec2& uav_xy, const UserSite& user,
                             double h0, double extra_horizontal) {
    geom.validate();
    const std::vector<double> ants = antenna_offsets(geom);
    const std::vector<double> ports = port_offsets(layout, sel);
    const double horiz = (uav_xy - user.position).norm();
    ChannelMatrix g(static_cast<int>(ports.size()), geom.n_antennas);
    for (std::size_t m = 0; m < ports.size(); ++m)
        fill_port_row(g, static_cast<int>(m), ports[m], geom, ants, horiz,
                      horiz + extra_horizontal, h0);
    return g;
}

}  // namespace

ChannelMatrix build_channel(const ArrayGeometry& geom, const PortLayout& layout,
                            const PortSelection& sel, const Vec2& uav_xy, const UserSite& user,
                            double h0) {
    return channel_kernel(geom, layout, sel, uav_xy, user, h0, 0.0);
}

ChannelMatrix worst_case_channel(const ArrayGeometry& geom, const PortLayout& layout,
                                 const PortSelection& sel, const Vec2& uav_xy,
                                 const UserSite& user, double h0) {
    user.validate();
    return channel_kernel(geom, layout, sel, uav_xy, user, h0,
                          std::sqrt(user.uncertainty_radius_sq));
}

ChannelMatrix LinkGeometry::channel(const PortSelection& sel) const {
    return robust ? worst_case_channel(array, layout, sel, uav_xy, user, h0)
                  : build_channel(array, layout, sel, uav_xy, user, h0);
}

void LinkGeometry::rebuild_row(ChannelMatrix& g, int row, int port) const {
    if (row < 0 || row >= g.rows()) throw ShapeError("rebuild_row: row out of range");
    if (port < 1 || port > layout.n_ports)
        throw InvalidInputError("rebuild_row: port index out of range");
    const std::vector<double> ants = antenna_offsets(array);
    const double port_off = 0.5 * (2 * (port - 1) - layout.n_ports + 1) * layout.port_spacing;
    const double horiz = (uav_xy - user.position).norm();
    const double extra = robust ? std::sqrt(user.uncertainty_radius_sq) : 0.0;
    fill_port_row(g, row, port_off, array, ants, horiz, horiz + extra, h0);
}

}  // namespace uavsem
