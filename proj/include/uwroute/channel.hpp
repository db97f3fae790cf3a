// Underwater acoustic link model: Thorp absorption, Urick-style attenuation,
// Rayleigh-faded BPSK bit errors and whole-packet delivery probability.
//
// All functions are pure and thread-safe.

#ifndef UWROUTE_CHANNEL_HPP
#define UWROUTE_CHANNEL_HPP

namespace uwroute::channel
{

struct ChannelParams
{
    double frequency_khz = 10.0;
    double spreading_kappa = 1.5;    ///< spreading exponent, must lie in [1, 2]
    double atten_const = 1.0;        ///< A_0, lumped scattering/refraction loss
    double energy_per_bit = 1.25e-4; ///< e_b in J/bit (usually replaced by calibrate())
    double noise_density = 1.0e-10;  ///< N_0 in W/Hz
    unsigned packet_bits = 512;      ///< M
    double bit_rate = 1.0e4;         ///< mu in bit/s

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;

    /// Serialization time of one packet, M / mu.
    double packet_duration() const { return packet_bits / bit_rate; }
};

/// Thorp absorption in dB/km for a carrier of `f_khz` kHz.
double thorp_absorption_db_per_km(double f_khz);

/// Linear absorption factor per kilometre, 10^(thorp/10).
double absorption_per_km(double f_khz);

/// A(l, f) = A_0 * l^kappa * a(f)^(l/1000), l in metres.
///
/// The spreading term uses metres while the absorption exponent uses
/// kilometres because Thorp's coefficient is a per-km figure.
double attenuation(double distance_m, const ChannelParams& params);

/// e_b / (N_0 * A(l, f)).
double mean_snr(double distance_m, const ChannelParams& params);

/// Average BPSK bit error probability under Rayleigh fading with mean SNR `snr`.
double bpsk_rayleigh_ber(double snr);

double bit_error_prob(double distance_m, const ChannelParams& params);

/// (1 - p_e)^bits, evaluated in log space.
double packet_success_prob(double bit_error, unsigned bits);

double packet_delivery_prob(double distance_m, const ChannelParams& params);

/// Nine-term sound speed polynomial (depth m, temperature C, salinity ppt).
double sound_speed(double depth_m, double temp_c, double salinity_ppt);

/// Returns `params` with energy_per_bit chosen by bisection so that
/// packet_delivery_prob(distance_m) equals `target` (to ~1e-12 relative in e_b).
ChannelParams calibrate(ChannelParams params, double distance_m, double target);

} // namespace uwroute::channel

#endif
