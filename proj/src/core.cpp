#include "dualaoi/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dualaoi {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// FNV-1a, 64 bit.
std::uint64_t hash_name(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

// ---------------------------------------------------------------------------

ServiceModel ServiceModel::exponential(double rate) {
    if (!positive_finite(rate))
        throw std::invalid_argument("exponential service rate must be positive and finite");
    return ServiceModel(ServiceKind::Exponential, rate);
}

ServiceModel ServiceModel::deterministic(double period) {
    if (!positive_finite(period))
        throw std::invalid_argument("deterministic service period must be positive and finite");
    return ServiceModel(ServiceKind::Deterministic, period);
}

std::string ServiceModel::describe() const {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    if (is_exponential())
        os << "Exp(rate=" << value_ << ")";
    else
        os << "Det(period=" << value_ << ")";
    return os.str();
}

// ---------------------------------------------------------------------------

std::string_view to_string(SystemKind kind) noexcept {
    switch (kind) {
        case SystemKind::MM: return "mm";
        case SystemKind::MD: return "md";
        case SystemKind::DD: return "dd";
        case SystemKind::MM2: return "mm2";
        case SystemKind::MM11Preempt: return "mm11";
    }
    return "?";
}

SystemKind parse_system_kind(std::string_view name) {
    const std::string n = lower(name);
    if (n == "mm" || n == "m-m") return SystemKind::MM;
    if (n == "md" || n == "m-d") return SystemKind::MD;
    if (n == "dd" || n == "d-d") return SystemKind::DD;
    if (n == "mm2" || n == "m/m/2") return SystemKind::MM2;
    if (n == "mm11" || n == "mm11-preempt" || n == "m/m/1/1") return SystemKind::MM11Preempt;
    throw std::invalid_argument("unknown system kind '" + std::string(name) + "'");
}

SystemSpec SystemSpec::mm(double mu_a, double mu_b) {
    SystemSpec s;
    s.kind = SystemKind::MM;
    s.sensor_a = ServiceModel::exponential(mu_a);
    s.sensor_b = ServiceModel::exponential(mu_b);
    return s;
}

SystemSpec SystemSpec::md(double mu, double period) {
    SystemSpec s;
    s.kind = SystemKind::MD;
    s.sensor_a = ServiceModel::exponential(mu);
    s.sensor_b = ServiceModel::deterministic(period);
    return s;
}

SystemSpec SystemSpec::dd(double period_a, double period_b, std::optional<double> offset) {
    SystemSpec s;
    s.kind = SystemKind::DD;
    s.sensor_a = ServiceModel::deterministic(period_a);
    s.sensor_b = ServiceModel::deterministic(period_b);
    s.dd_offset = offset;
    s.validate();
    return s;
}

SystemSpec SystemSpec::mm2(double lambda, double mu) {
    SystemSpec s;
    s.kind = SystemKind::MM2;
    s.sensor_a = ServiceModel::exponential(mu);
    s.sensor_b.reset();
    s.arrival_rate = lambda;
    s.validate();
    return s;
}

SystemSpec SystemSpec::mm11_preempt(double lambda, double mu) {
    SystemSpec s;
    s.kind = SystemKind::MM11Preempt;
    s.sensor_a = ServiceModel::exponential(mu);
    s.sensor_b.reset();
    s.arrival_rate = lambda;
    s.validate();
    return s;
}

bool SystemSpec::is_dual() const noexcept {
    return kind == SystemKind::MM || kind == SystemKind::MD || kind == SystemKind::DD;
}

double SystemSpec::total_service_rate() const noexcept {
    switch (kind) {
        case SystemKind::MM2: return 2.0 * sensor_a.rate();
        case SystemKind::MM11Preempt: return sensor_a.rate();
        default: return sensor_a.rate() + (sensor_b ? sensor_b->rate() : 0.0);
    }
}

void SystemSpec::validate() const {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    };
    switch (kind) {
        case SystemKind::MM:
            require(sensor_a.is_exponential(), "sensor_a: M-M requires an exponential law");
            require(sensor_b && sensor_b->is_exponential(), "sensor_b: M-M requires an exponential law");
            break;
        case SystemKind::MD:
            require(sensor_a.is_exponential(), "sensor_a: M-D requires an exponential law");
            require(sensor_b && !sensor_b->is_exponential(), "sensor_b: M-D requires a deterministic law");
            break;
        case SystemKind::DD:
            require(!sensor_a.is_exponential(), "sensor_a: D-D requires a deterministic law");
            require(sensor_b && !sensor_b->is_exponential(), "sensor_b: D-D requires a deterministic law");
            if (dd_offset)
                require(std::isfinite(*dd_offset) && *dd_offset >= 0.0 && *dd_offset < sensor_b->period(),
                        "dd_offset: must lie in [0, period_b)");
            break;
        case SystemKind::MM2:
        case SystemKind::MM11Preempt:
            require(sensor_a.is_exponential(), "mu: server law must be exponential");
            require(!sensor_b, "sensor_b: single-queue systems take no second sensor");
            require(arrival_rate && positive_finite(*arrival_rate), "lambda: arrival rate must be positive and finite");
            if (kind == SystemKind::MM2)
                require(*arrival_rate < 2.0 * sensor_a.rate(), "lambda: M/M/2 needs lambda < 2 mu to be stable");
            break;
    }
    if (kind != SystemKind::DD)
        require(!dd_offset, "dd_offset: only meaningful for D-D");
    if (kind != SystemKind::MM2 && kind != SystemKind::MM11Preempt)
        require(!arrival_rate, "lambda: dual systems are generate-at-will and take no arrival rate");
}

// ---------------------------------------------------------------------------

RandomStream::RandomStream(std::uint64_t master_seed, std::string_view name) {
    const std::uint64_t h = hash_name(name);
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    engine_.seed(seq);
}

double RandomStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RandomStream::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

double sample_service(const ServiceModel& model, RandomStream& stream) {
    if (model.is_exponential()) return stream.exponential(model.rate());
    return model.period();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------

AoiPath AoiPath::starting_at(double now, double last_refresh) {
    if (last_refresh > now) throw std::invalid_argument("last refresh timestamp lies in the future");
    AoiPath p;
    p.now_ = now;
    p.last_refresh_ = last_refresh;
    return p;
}

void AoiPath::advance(double dt) {
    if (!(dt >= 0.0)) throw std::invalid_argument("AoiPath::advance: negative time step");
    if (dt == 0.0) return;
    area_ += current_age() * dt + 0.5 * dt * dt;
    now_ += dt;
    elapsed_ += dt;
}

void AoiPath::advance_to(double now) { advance(now - now_); }

Delivery AoiPath::deliver(double generation_time, double now) {
    if (generation_time > now) throw std::invalid_argument("AoiPath::deliver: update generated after delivery");
    advance_to(now);
    if (generation_time <= last_refresh_) {
        ++obsolete_;
        return Delivery::Obsolete;
    }
    const double peak = now_ - last_refresh_;
    peaks_.push_back(peak);
    peak_sum_ += peak;
    last_refresh_ = generation_time;
    ++accepted_;
    return Delivery::Accepted;
}

void AoiPath::reset_statistics() {
    area_ = 0.0;
    elapsed_ = 0.0;
    peak_sum_ = 0.0;
    peaks_.clear();
    accepted_ = 0;
    obsolete_ = 0;
}

double AoiPath::average_age() const { return elapsed_ > 0.0 ? area_ / elapsed_ : 0.0; }

double AoiPath::average_peak() const {
    return peaks_.empty() ? 0.0 : peak_sum_ / static_cast<double>(peaks_.size());
}

}  // namespace dualaoi
