#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "uavsem/errors.hpp"

namespace uavsem {

using Vec2 = Eigen::Vector2d;

/// Line-of-sight channel between the transmit array and the active ports:
/// rows = active ports (bottom to top), columns = transmit antennas.
using ChannelMatrix = Eigen::MatrixXcd;

/// Vertical uniform transmit array mounted under the UAV.
struct ArrayGeometry {
    int n_antennas = 1;              ///< antennas, numbered bottom to top
    double antenna_spacing = 0.0;    ///< meters between adjacent antennas
    double uav_height = 0.0;         ///< flight height of the array origin, meters
    double carrier_wavelength = 0.0; ///< meters

    void validate() const;
};

/// Evenly spaced vertical line of candidate receive ports at a user.
struct PortLayout {
    int n_ports = 1;             ///< total ports, numbered bottom to top
    double port_spacing = 0.0;   ///< meters between adjacent ports
    int n_active = 1;            ///< simultaneously active ports

    void validate() const;
};

/// Strictly increasing 1-based indices of the active ports.
struct PortSelection {
    std::vector<int> indices;

    void validate(const PortLayout& layout) const;
    bool operator==(const PortSelection&) const = default;
};

/// Evenly spread initial selection of n_active ports out of n_ports.
PortSelection uniform_port_selection(const PortLayout& layout);

/// A ground user with an uncertain position: the true location lies within
/// a disc of squared radius uncertainty_radius_sq around `position`.
struct UserSite {
    Vec2 position = Vec2::Zero();       ///< meters, ground plane
    double uncertainty_radius_sq = 0.0; ///< meters^2

    void validate() const;
};

/// Vertical offsets of the antennas from the array origin, bottom to top.
/// offset(n) = (2(n-1) - N + 1)/2 * spacing, symmetric about zero.
std::vector<double> antenna_offsets(const ArrayGeometry& geom);

/// Vertical offsets of the selected ports from the port-array origin.
std::vector<double> port_offsets(const PortLayout& layout, const PortSelection& sel);

/// Distance from the array origin to a port at the given vertical offset.
double path_length(const Vec2& uav_xy, const UserSite& user, double uav_height,
                   double port_offset);

/// Sine of the departure angle toward a port; height_gap = H - port offset.
double departure_sine(double height_gap, double path_len);

/// Extra propagation distance of an antenna at `antenna_offset` relative to
/// the array origin. |result| <= |antenna_offset| whenever |sin_theta| <= 1.
double path_difference(double path_len, double antenna_offset, double sin_theta);

/// Amplitude gain of one antenna-port pair; h0 is the reference amplitude at 1 m.
double channel_gain(double h0, double vertical_gap, double horizontal_dist);

/// Full channel matrix for the selected ports at the nominal user position.
ChannelMatrix build_channel(const ArrayGeometry& geom, const PortLayout& layout,
                            const PortSelection& sel, const Vec2& uav_xy,
                            const UserSite& user, double h0);

/// Lower-bound channel under user-location uncertainty: amplitudes are
/// evaluated with the horizontal distance inflated by sqrt(V); phases keep the
/// nominal position. With V = 0 the result is bit-identical to build_channel.
ChannelMatrix worst_case_channel(const ArrayGeometry& geom, const PortLayout& layout,
                                 const PortSelection& sel, const Vec2& uav_xy,
                                 const UserSite& user, double h0);

/// Everything fixed about one UAV-position/user link. Bundles the channel
/// construction mode so rate optimization code does not care whether the
/// nominal or the worst-case channel is in use.
struct LinkGeometry {
    ArrayGeometry array;
    PortLayout layout;
    UserSite user;
    Vec2 uav_xy = Vec2::Zero();
    double h0 = 1.0;
    bool robust = false;

    ChannelMatrix channel(const PortSelection& sel) const;
    /// Replace one row of `g` with the response of `port` (1-based).
    void rebuild_row(ChannelMatrix& g, int row, int port) const;
};

}  // namespace uavsem
