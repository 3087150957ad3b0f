#include "nlcomp/config.hpp"

#include "nlcomp/classifier.hpp"
#include "nlcomp/error.hpp"
#include "nlcomp/rng.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace nlcomp {

namespace {

constexpr std::size_t kMaxNodes = 4000;

struct Entry {
    std::string value;
    int line = 0;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class Reader {
public:
    Reader(std::string source, std::map<std::string, Entry> entries)
        : source_(std::move(source)), entries_(std::move(entries)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        std::ostringstream msg;
        msg << source_;
        if (auto it = entries_.find(key); it != entries_.end()) {
            msg << ':' << it->second.line;
        }
        msg << ": key '" << key << "': " << message;
        throw Error(ErrorKind::Config, msg.str());
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    const std::string& raw(const std::string& key) {
        used_.insert(key);
        return entries_.at(key).value;
    }

    double real(const std::string& key) {
        const std::string& text = raw(key);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            fail(key, "expected a number, got '" + text + "'");
        }
        if (!std::isfinite(value)) {
            fail(key, "value must be finite");
        }
        return value;
    }

    long long integer(const std::string& key) {
        const std::string& text = raw(key);
        long long value = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            fail(key, "expected an integer, got '" + text + "'");
        }
        return value;
    }

    std::uint64_t unsigned64(const std::string& key) {
        const std::string& text = raw(key);
        std::uint64_t value = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            fail(key, "expected an unsigned 64-bit integer, got '" + text + "'");
        }
        return value;
    }

    bool boolean(const std::string& key) {
        const std::string& text = raw(key);
        if (text == "true" || text == "yes" || text == "1") {
            return true;
        }
        if (text == "false" || text == "no" || text == "0") {
            return false;
        }
        fail(key, "expected true or false, got '" + text + "'");
    }

    std::vector<std::string> unused() const {
        std::vector<std::string> out;
        for (const auto& [key, entry] : entries_) {
            if (!used_.count(key)) {
                out.push_back(key);
            }
        }
        return out;
    }

    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    std::string source_;
    std::map<std::string, Entry> entries_;
    std::set<std::string> used_;
};

std::map<std::string, Entry> tokenize(std::string_view text, const std::string& source) {
    std::map<std::string, Entry> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            std::ostringstream msg;
            msg << source << ':' << line_no << ": expected 'key = value'";
            throw Error(ErrorKind::Config, msg.str());
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty() || value.empty()) {
            std::ostringstream msg;
            msg << source << ':' << line_no << ": empty " << (key.empty() ? "key" : "value for '" + key + "'");
            throw Error(ErrorKind::Config, msg.str());
        }
        for (char ch : key) {
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_')) {
                std::ostringstream msg;
                msg << source << ':' << line_no << ": invalid character in key '" << key << "'";
                throw Error(ErrorKind::Config, msg.str());
            }
        }
        if (auto it = entries.find(key); it != entries.end()) {
            std::ostringstream msg;
            msg << source << ':' << line_no << ": duplicate key '" << key << "' (first set on line "
                << it->second.line << ")";
            throw Error(ErrorKind::Config, msg.str());
        }
        entries.emplace(key, Entry{value, line_no});
    }
    return entries;
}

ProfileSpec::Kind parse_profile_kind(Reader& r, const std::string& key) {
    const std::string& name = r.raw(key);
    if (name == "const") {
        return ProfileSpec::Kind::Const;
    }
    if (name == "cosine") {
        return ProfileSpec::Kind::Cosine;
    }
    if (name == "sine") {
        return ProfileSpec::Kind::Sine;
    }
    if (name == "bump") {
        return ProfileSpec::Kind::Bump;
    }
    r.fail(key, "unknown profile '" + name + "' (const, cosine, sine, bump)");
}

/// `prefix = number` or `prefix.profile = name` with optional parameter keys.
std::optional<ProfileSpec> read_profile(Reader& r, const std::string& prefix) {
    const bool scalar = r.has(prefix);
    const bool named = r.has(prefix + ".profile");
    static const char* const fields[] = {"value", "amplitude", "frequency", "offset", "center", "width"};
    bool any_field = false;
    for (const char* f : fields) {
        any_field = any_field || r.has(prefix + "." + f);
    }
    if (scalar && (named || any_field)) {
        r.fail(prefix, "give either a constant or a profile, not both");
    }
    if (scalar) {
        return ProfileSpec::constant(r.real(prefix));
    }
    if (!named) {
        if (any_field) {
            r.fail(prefix + ".profile", "profile parameters given without a profile name");
        }
        return std::nullopt;
    }
    ProfileSpec p;
    p.kind = parse_profile_kind(r, prefix + ".profile");
    auto field = [&](const char* name, double& target) {
        const std::string key = prefix + "." + name;
        if (r.has(key)) {
            target = r.real(key);
        }
    };
    field("value", p.value);
    field("amplitude", p.amplitude);
    field("frequency", p.frequency);
    field("offset", p.offset);
    field("center", p.center);
    field("width", p.width);
    if (p.kind == ProfileSpec::Kind::Bump && !(p.width > 0.0)) {
        r.fail(prefix + ".width", "bump width must be positive");
    }
    return p;
}

KernelChoice read_kernel(Reader& r, const std::string& prefix, const KernelChoice& fallback) {
    KernelChoice k = fallback;
    const std::string fam = prefix + ".family";
    if (r.has(fam)) {
        try {
            k.family = parse_kernel_family(r.raw(fam));
        } catch (const Error& e) {
            r.fail(fam, e.what());
        }
    }
    const bool sigma = r.has(prefix + ".sigma");
    const bool radius = r.has(prefix + ".radius");
    if (sigma && radius) {
        r.fail(prefix + ".sigma", "give sigma or radius, not both");
    }
    if (sigma || radius) {
        const std::string key = prefix + (sigma ? ".sigma" : ".radius");
        const bool gaussian = k.family == KernelFamily::Gaussian;
        if (sigma != gaussian) {
            r.fail(key, gaussian ? "gaussian kernels take sigma" : "compact kernels take radius");
        }
        k.scale = r.real(key);
        if (!(k.scale > 0.0)) {
            r.fail(key, "must be positive");
        }
    }
    return k;
}

void check(Reader& r, const std::string& key, bool ok, const std::string& message) {
    if (!ok) {
        r.fail(key, message);
    }
}

}  // namespace

ProfileSpec ProfileSpec::constant(double value) {
    ProfileSpec p;
    p.kind = Kind::Const;
    p.value = value;
    return p;
}

PotentialField ProfileSpec::evaluate(const SpatialGrid& grid) const {
    PotentialField f(static_cast<Eigen::Index>(grid.size()));
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.node(i);
        double y = value;
        switch (kind) {
        case Kind::Const:
            break;
        case Kind::Cosine:
            y = offset + amplitude * std::cos(two_pi * frequency * x);
            break;
        case Kind::Sine:
            y = offset + amplitude * std::sin(two_pi * frequency * x);
            break;
        case Kind::Bump: {
            const double z = (x - center) / width;
            y = offset + amplitude * std::exp(-z * z);
            break;
        }
        }
        f[static_cast<Eigen::Index>(i)] = y;
    }
    if (!f.allFinite()) {
        throw Error(ErrorKind::Config, "profile " + describe() + " is not finite on the grid");
    }
    return f;
}

std::string ProfileSpec::describe() const {
    std::ostringstream out;
    switch (kind) {
    case Kind::Const:
        out << value;
        break;
    case Kind::Cosine:
        out << offset << " + " << amplitude << " cos(2 pi " << frequency << " x)";
        break;
    case Kind::Sine:
        out << offset << " + " << amplitude << " sin(2 pi " << frequency << " x)";
        break;
    case Kind::Bump:
        out << offset << " + " << amplitude << " exp(-((x - " << center << ") / " << width << ")^2)";
        break;
    }
    return out.str();
}

KernelSpec KernelChoice::spec() const {
    switch (family) {
    case KernelFamily::Tophat:
        return KernelSpec::tophat(scale);
    case KernelFamily::Gaussian:
        return KernelSpec::gaussian(scale);
    case KernelFamily::CosineBump:
        return KernelSpec::cosine_bump(scale);
    }
    throw Error(ErrorKind::Config, "unknown kernel family");
}

std::vector<double> parse_range(std::string_view text) {
    text = trim(text);
    auto number = [](std::string_view s) {
        s = trim(s);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
            throw Error(ErrorKind::Config, "bad number '" + std::string(s) + "' in range");
        }
        return v;
    };
    std::vector<double> values;
    if (text.find(':') != std::string_view::npos) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos) {
            throw Error(ErrorKind::Config, "range must look like lo:hi:count");
        }
        const double lo = number(text.substr(0, a));
        const double hi = number(text.substr(a + 1, b - a - 1));
        const std::string_view count_text = trim(text.substr(b + 1));
        long long count = 0;
        const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
        if (ec != std::errc() || ptr != count_text.data() + count_text.size()) {
            throw Error(ErrorKind::Config, "range count must be an integer");
        }
        if (count <= 0 || hi < lo || (count == 1 && hi != lo) || count > 10000) {
            throw Error(ErrorKind::Config, "empty or malformed range '" + std::string(text) + "'");
        }
        for (long long k = 0; k < count; ++k) {
            values.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
        }
        return values;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        values.push_back(number(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    if (values.empty()) {
        throw Error(ErrorKind::Config, "empty range");
    }
    return values;
}

ScenarioConfig parse_config(std::string_view text, const std::string& source) {
    Reader r(source, tokenize(text, source));
    ScenarioConfig cfg;
    cfg.source = source;

    if (r.has("grid.lo")) cfg.lo = r.real("grid.lo");
    if (r.has("grid.hi")) cfg.hi = r.real("grid.hi");
    if (r.has("grid.n")) {
        const long long n = r.integer("grid.n");
        check(r, "grid.n", n >= 3 && n <= static_cast<long long>(kMaxNodes),
              "must be between 3 and " + std::to_string(kMaxNodes));
        cfg.n = static_cast<std::size_t>(n);
    }
    check(r, "grid.hi", cfg.lo < cfg.hi, "grid.lo must be below grid.hi");

    cfg.kernel_u = read_kernel(r, "kernel.u", KernelChoice{});
    cfg.kernel_v = read_kernel(r, "kernel.v", cfg.kernel_u);

    if (r.has("regime")) {
        try {
            const BoundaryRegime::Tag tag = parse_regime(r.raw("regime"));
            cfg.regime = tag == BoundaryRegime::Tag::Periodic ? BoundaryRegime::periodic(cfg.hi - cfg.lo)
                         : tag == BoundaryRegime::Tag::Hostile ? BoundaryRegime::hostile()
                                                               : BoundaryRegime::no_flux();
        } catch (const Error& e) {
            r.fail("regime", e.what());
        }
    }

    if (r.has("model.d")) cfg.d = r.real("model.d");
    if (r.has("model.D")) cfg.D = r.real("model.D");
    if (r.has("model.alpha")) cfg.alpha = r.real("model.alpha");
    if (r.has("model.beta")) cfg.beta = r.real("model.beta");
    check(r, "model.d", cfg.d > 0.0, "dispersal rate must be positive");
    check(r, "model.D", cfg.D > 0.0, "dispersal rate must be positive");
    check(r, "model.alpha", cfg.alpha >= 0.0 && cfg.alpha <= 1.0, "mixing weight must lie in [0, 1]");
    check(r, "model.beta", cfg.beta >= 0.0 && cfg.beta <= 1.0, "mixing weight must lie in [0, 1]");
    if ((cfg.alpha < 1.0 || cfg.beta < 1.0) && cfg.regime.tag != BoundaryRegime::Tag::NoFlux) {
        r.fail(cfg.alpha < 1.0 ? "model.alpha" : "model.beta", "mixed dispersal is only defined for noflux");
    }

    const std::map<std::string, double> defaults = {{"m", 1.0}, {"M", 1.0}, {"b", 0.5},
                                                    {"c", 0.5}, {"b1", 1.0}, {"c1", 1.0}};
    for (const auto& [name, value] : defaults) {
        auto p = read_profile(r, "coef." + name);
        cfg.coefficients[name] = p ? *p : ProfileSpec::constant(value);
    }

    if (r.has("init.kind")) {
        const std::string& kind = r.raw("init.kind");
        if (kind == "random") {
            cfg.init.kind = InitSpec::Kind::Random;
        } else if (kind == "constant") {
            cfg.init.kind = InitSpec::Kind::Constant;
        } else if (kind == "profile") {
            cfg.init.kind = InitSpec::Kind::Profile;
        } else {
            r.fail("init.kind", "expected random, constant or profile, got '" + kind + "'");
        }
    }
    if (auto p = read_profile(r, "init.u")) cfg.init.u = *p;
    if (auto p = read_profile(r, "init.v")) cfg.init.v = *p;
    if (cfg.init.kind == InitSpec::Kind::Constant &&
        (cfg.init.u.kind != ProfileSpec::Kind::Const || cfg.init.v.kind != ProfileSpec::Kind::Const)) {
        r.fail("init.kind", "constant initial data cannot use profiles");
    }

    if (r.has("rng.algorithm")) {
        cfg.rng_algorithm = r.raw("rng.algorithm");
        check(r, "rng.algorithm", cfg.rng_algorithm == Rng::kAlgorithm,
              "unsupported generator '" + cfg.rng_algorithm + "' (only " + std::string(Rng::kAlgorithm) + ")");
    }
    if (r.has("rng.seed")) cfg.seed = r.unsigned64("rng.seed");

    if (r.has("control.horizon")) cfg.horizon = r.real("control.horizon");
    check(r, "control.horizon", cfg.horizon > 0.0 && cfg.horizon <= 1e6, "must lie in (0, 1e6]");
    if (r.has("control.n_inits")) {
        const long long k = r.integer("control.n_inits");
        check(r, "control.n_inits", k >= 1 && k <= 1000, "must lie in [1, 1000]");
        cfg.n_inits = static_cast<int>(k);
    }
    if (r.has("control.tolerance")) cfg.tolerance = r.real("control.tolerance");
    check(r, "control.tolerance", cfg.tolerance > 0.0 && cfg.tolerance < 1.0, "must lie in (0, 1)");
    if (r.has("control.threshold")) cfg.threshold = r.real("control.threshold");
    check(r, "control.threshold", cfg.threshold > 0.0, "must be positive");
    if (r.has("control.s_samples")) {
        const long long k = r.integer("control.s_samples");
        check(r, "control.s_samples", k >= 2 && k <= 1001, "must lie in [2, 1001]");
        cfg.s_samples = static_cast<int>(k);
    }
    if (r.has("control.verify")) cfg.verify = r.boolean("control.verify");
    if (r.has("control.bracket_horizon")) cfg.bracket_horizon = r.real("control.bracket_horizon");
    check(r, "control.bracket_horizon", cfg.bracket_horizon > 0.0 && cfg.bracket_horizon <= 1e6,
          "must lie in (0, 1e6]");

    if (r.has("output.report")) cfg.report = r.raw("output.report");
    if (r.has("output.csv_prefix")) cfg.csv_prefix = r.raw("output.csv_prefix");
    if (r.has("output.csv_every")) {
        const long long k = r.integer("output.csv_every");
        check(r, "output.csv_every", k >= 1 && k <= 1000000, "must be a positive integer");
        cfg.csv_every = static_cast<int>(k);
    }
    for (const std::string* name : {&cfg.report, &cfg.csv_prefix}) {
        if (name->find('/') != std::string::npos || *name == "." || *name == "..") {
            r.fail(name == &cfg.report ? "output.report" : "output.csv_prefix", "must be a plain file name");
        }
    }

    for (const char* axis : {"b", "c", "d", "D", "alpha", "beta"}) {
        const std::string key = std::string("sweep.") + axis;
        if (r.has(key)) {
            try {
                cfg.sweep.push_back({axis, parse_range(r.raw(key))});
            } catch (const Error& e) {
                r.fail(key, e.what());
            }
        }
    }
    if (r.has("sweep.filter")) {
        const std::string& f = r.raw("sweep.filter");
        check(r, "sweep.filter", f == "weak" || f == "all", "expected weak or all");
        cfg.sweep_weak_only = f == "weak";
    }
    if (r.has("sweep.threads")) {
        const long long k = r.integer("sweep.threads");
        check(r, "sweep.threads", k >= 0 && k <= 256, "must lie in [0, 256]");
        cfg.sweep_threads = static_cast<int>(k);
    }

    if (const auto unused = r.unused(); !unused.empty()) {
        r.fail(unused.front(), "unknown key");
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Config, "cannot read config file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.filename().string());
}

ModelParams build_model(const ScenarioConfig& config, const std::map<std::string, double>& overrides) {
    auto pick = [&](const std::string& name, double fallback) {
        const auto it = overrides.find(name);
        return it == overrides.end() ? fallback : it->second;
    };
    const SpatialGrid grid = build_grid(config.lo, config.hi, config.n);
    const double d = pick("d", config.d);
    const double D = pick("D", config.D);
    const double alpha = pick("alpha", config.alpha);
    const double beta = pick("beta", config.beta);

    ModelParams p;
    p.op_u = std::make_shared<const DispersalOperator>(
        assemble_dispersal(config.kernel_u.spec(), grid, config.regime, d, alpha));
    p.op_v = std::make_shared<const DispersalOperator>(
        assemble_dispersal(config.kernel_v.spec(), grid, config.regime, D, beta));
    auto field = [&](const std::string& name) {
        if (const auto it = overrides.find(name); it != overrides.end()) {
            return PotentialField::Constant(static_cast<Eigen::Index>(grid.size()), it->second).eval();
        }
        return config.coefficients.at(name).evaluate(grid);
    };
    p.m = field("m");
    p.M = field("M");
    p.b = field("b");
    p.c = field("c");
    p.b1 = field("b1");
    p.c1 = field("c1");
    p.validate();
    return p;
}

SystemState build_initial_state(const ScenarioConfig& config, const ModelParams& params) {
    SystemState s;
    if (config.init.kind == InitSpec::Kind::Random) {
        return random_initial_states(params, 1, config.seed).front();
    }
    s.u = config.init.u.evaluate(params.grid());
    s.v = config.init.v.evaluate(params.grid());
    if (s.u.minCoeff() < 0.0 || s.v.minCoeff() < 0.0) {
        throw Error(ErrorKind::Config, "initial data must be nonnegative");
    }
    return s;
}

}  // namespace nlcomp
