#include "uwroute/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uwroute::channel
{

namespace
{

void
require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value))
    {
        throw std::invalid_argument(std::string("channel.") + name + " must be positive");
    }
}

void
require_distance(double distance_m)
{
    if (!(distance_m > 0.0))
    {
        throw std::domain_error("link distance must be positive, got " + std::to_string(distance_m));
    }
}

} // namespace

void
ChannelParams::validate() const
{
    require_positive(frequency_khz, "frequency_khz");
    require_positive(atten_const, "atten_const");
    require_positive(energy_per_bit, "energy_per_bit");
    require_positive(noise_density, "noise_density");
    require_positive(bit_rate, "bit_rate");
    if (packet_bits == 0)
    {
        throw std::invalid_argument("channel.packet_bits must be at least 1");
    }
    if (!(spreading_kappa >= 1.0 && spreading_kappa <= 2.0))
    {
        throw std::invalid_argument("channel.spreading must lie in [1, 2]");
    }
}

double
thorp_absorption_db_per_km(double f_khz)
{
    if (!(f_khz > 0.0))
    {
        throw std::domain_error("frequency must be positive");
    }
    const double fsq = f_khz * f_khz;
    return 2.75e-4 * fsq + 44.0 * fsq / (4100.0 + f_khz) + 0.11 * fsq / (1.0 + fsq) + 1e-3;
}

double
absorption_per_km(double f_khz)
{
    return std::pow(10.0, thorp_absorption_db_per_km(f_khz) / 10.0);
}

double
attenuation(double distance_m, const ChannelParams& params)
{
    require_distance(distance_m);
    const double spreading = std::pow(distance_m, params.spreading_kappa);
    // a^(l/1000) done in dB to stay accurate for long links
    const double absorption_db = thorp_absorption_db_per_km(params.frequency_khz) * distance_m / 1000.0;
    return params.atten_const * spreading * std::pow(10.0, absorption_db / 10.0);
}

double
mean_snr(double distance_m, const ChannelParams& params)
{
    return params.energy_per_bit / (params.noise_density * attenuation(distance_m, params));
}

double
bpsk_rayleigh_ber(double snr)
{
    if (!(snr >= 0.0))
    {
        throw std::domain_error("mean SNR must be non-negative");
    }
    if (std::isinf(snr))
    {
        return 0.0;
    }
    // 1 - sqrt(s/(1+s)) rewritten to avoid cancellation at high SNR
    const double root = std::sqrt(snr / (1.0 + snr));
    return 0.5 * (1.0 / (1.0 + snr)) / (1.0 + root);
}

double
bit_error_prob(double distance_m, const ChannelParams& params)
{
    return bpsk_rayleigh_ber(mean_snr(distance_m, params));
}

double
packet_success_prob(double bit_error, unsigned bits)
{
    if (!(bit_error >= 0.0 && bit_error <= 1.0))
    {
        throw std::domain_error("bit error probability outside [0, 1]");
    }
    if (bit_error == 1.0)
    {
        return 0.0;
    }
    return std::exp(static_cast<double>(bits) * std::log1p(-bit_error));
}

double
packet_delivery_prob(double distance_m, const ChannelParams& params)
{
    return packet_success_prob(bit_error_prob(distance_m, params), params.packet_bits);
}

double
sound_speed(double depth_m, double temp_c, double salinity_ppt)
{
    const double h = depth_m;
    const double t = temp_c;
    const double ds = salinity_ppt - 35.0;
    return -7.139e-13 * h * h * h * t + 2.374e-2 * t * t * t + 1.675e-7 * h * h - 5.304e-2 * t * t -
           1.025e-2 * t * ds + 0.163 * h + 4.591 * t + 1.34 * ds + 1448.96;
}

ChannelParams
calibrate(ChannelParams params, double distance_m, double target)
{
    require_distance(distance_m);
    if (!(target > 0.0 && target < 1.0))
    {
        throw std::domain_error("calibration target must lie in (0, 1)");
    }
    params.validate();

    // bisection on log10(e_b); delivery probability is monotone in e_b
    double lo = std::log10(params.noise_density) - 5.0;
    double hi = std::log10(params.noise_density) + 25.0;
    auto delivery_at = [&](double log_eb) {
        ChannelParams trial = params;
        trial.energy_per_bit = std::pow(10.0, log_eb);
        return packet_delivery_prob(distance_m, trial);
    };
    if (delivery_at(lo) > target || delivery_at(hi) < target)
    {
        throw std::domain_error("calibration target not bracketed");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        if (delivery_at(mid) < target)
        {
            lo = mid;
        }
        else
        {
            hi = mid;
        }
    }
    params.energy_per_bit = std::pow(10.0, 0.5 * (lo + hi));
    return params;
}

} // namespace uwroute::channel
