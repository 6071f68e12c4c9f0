#include <cstdio>
#include <fstream>
#include <sstream>

#include "wavesum/kernel.hpp"

namespace wavesum::kernel {

namespace {
constexpr const char* kMagic = "wavesum-profile";
constexpr int kVersion = 1;

std::string hexf(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}
}  // namespace

std::string profile_cache_key(int d, int order, double support_radius, double tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "profile-v%d-d%d-o%d-R%.17g-tol%.17g.txt", kVersion, d, order, support_radius, tol);
    return buf;
}

void save_profile(const KernelProfile& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("save_profile: cannot open " + path);
    out << kMagic << ' ' << kVersion << '\n';
    out << "d " << p.d << "\norder " << p.order << "\nsupport_radius " << hexf(p.support_radius) << "\ntol "
        << hexf(p.tol) << "\nbump_exponent " << p.bump_exponent << "\nrho_min " << hexf(p.rho_min) << "\nlog_step "
        << hexf(p.log_step) << "\nlog_scale " << hexf(p.log_scale) << "\nrho_peak " << hexf(p.rho_peak)
        << "\nrho_lo " << hexf(p.rho_lo) << "\nrho_max " << hexf(p.rho_max) << "\nsamples " << p.samples.size()
        << '\n';
    for (double v : p.samples) out << hexf(v) << '\n';
}

std::optional<KernelProfile> load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != kMagic || version != kVersion) return std::nullopt;
    KernelProfile p;
    std::string key, val;
    std::size_t n = 0;
    auto num = [](const std::string& s) { return std::strtod(s.c_str(), nullptr); };
    while (in >> key >> val) {
        if (key == "d") p.d = std::stoi(val);
        else if (key == "order") p.order = std::stoi(val);
        else if (key == "support_radius") p.support_radius = num(val);
        else if (key == "tol") p.tol = num(val);
        else if (key == "bump_exponent") p.bump_exponent = std::stoi(val);
        else if (key == "rho_min") p.rho_min = num(val);
        else if (key == "log_step") p.log_step = num(val);
        else if (key == "log_scale") p.log_scale = num(val);
        else if (key == "rho_peak") p.rho_peak = num(val);
        else if (key == "rho_lo") p.rho_lo = num(val);
        else if (key == "rho_max") p.rho_max = num(val);
        else if (key == "samples") {
            n = std::stoul(val);
            break;
        } else
            return std::nullopt;
    }
    p.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(in >> val)) return std::nullopt;
        p.samples[i] = num(val);
    }
    if (n < 8) return std::nullopt;
    p.build_interpolant();
    return p;
}

}  // namespace wavesum::kernel
