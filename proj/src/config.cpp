#include "glyphforge/config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "glyphforge/bytes.hpp"
#include "glyphforge/descriptor.hpp"
#include "glyphforge/error.hpp"

namespace glyphforge {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& msg) { fail(ErrorKind::configuration, "config: " + msg); }

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) bad("bad value for " + key + ": '" + value + "'");
    return out;
}

struct FieldRef {
    const char* key;
    enum { u64_f, int_f, ll_f, dbl_f, str_f } type;
    void* ptr;
};

std::vector<FieldRef> fields(RunConfig& c) {
    return {
        {"seed", FieldRef::u64_f, &c.seed},
        {"learning_rate", FieldRef::dbl_f, &c.learning_rate},
        {"learning_rate_net1", FieldRef::dbl_f, &c.net_learning_rate[0]},
        {"learning_rate_net2", FieldRef::dbl_f, &c.net_learning_rate[1]},
        {"learning_rate_net3", FieldRef::dbl_f, &c.net_learning_rate[2]},
        {"learning_rate_net4", FieldRef::dbl_f, &c.net_learning_rate[3]},
        {"learning_rate_net5", FieldRef::dbl_f, &c.net_learning_rate[4]},
        {"learning_rate_net6", FieldRef::dbl_f, &c.net_learning_rate[5]},
        {"learning_rate_net7", FieldRef::dbl_f, &c.net_learning_rate[6]},
        {"momentum", FieldRef::dbl_f, &c.momentum},
        {"batch_size", FieldRef::int_f, &c.batch_size},
        {"max_epochs", FieldRef::int_f, &c.max_epochs},
        {"patience", FieldRef::int_f, &c.patience},
        {"arch", FieldRef::str_f, &c.arch},
        {"n_pos", FieldRef::int_f, &c.n_pos},
        {"n_neg", FieldRef::int_f, &c.n_neg},
        {"val_pos", FieldRef::int_f, &c.val_pos},
        {"val_neg", FieldRef::int_f, &c.val_neg},
        {"gen_learning_rate", FieldRef::dbl_f, &c.gen_learning_rate},
        {"gen_momentum", FieldRef::dbl_f, &c.gen_momentum},
        {"gen_batch_size", FieldRef::int_f, &c.gen_batch_size},
        {"gen_max_epochs", FieldRef::int_f, &c.gen_max_epochs},
        {"gen_patience", FieldRef::int_f, &c.gen_patience},
        {"test_families", FieldRef::int_f, &c.test_families},
        {"val_families", FieldRef::int_f, &c.val_families},
        {"homogeneity_pairs", FieldRef::ll_f, &c.homogeneity_pairs},
    };
}

void assign(const FieldRef& f, const std::string& value) {
    switch (f.type) {
    case FieldRef::u64_f: *static_cast<uint64_t*>(f.ptr) = parse_number<uint64_t>(f.key, value); break;
    case FieldRef::int_f: *static_cast<int*>(f.ptr) = parse_number<int>(f.key, value); break;
    case FieldRef::ll_f: *static_cast<long long*>(f.ptr) = parse_number<long long>(f.key, value); break;
    case FieldRef::dbl_f: *static_cast<double*>(f.ptr) = parse_number<double>(f.key, value); break;
    case FieldRef::str_f: *static_cast<std::string*>(f.ptr) = value; break;
    }
}

std::string render(const FieldRef& f) {
    char buf[64];
    switch (f.type) {
    case FieldRef::u64_f: {
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), *static_cast<uint64_t*>(f.ptr));
        return std::string(buf, p);
    }
    case FieldRef::int_f: {
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), *static_cast<int*>(f.ptr));
        return std::string(buf, p);
    }
    case FieldRef::ll_f: {
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), *static_cast<long long*>(f.ptr));
        return std::string(buf, p);
    }
    case FieldRef::dbl_f: {
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), *static_cast<double*>(f.ptr));
        return std::string(buf, p);
    }
    case FieldRef::str_f: return *static_cast<std::string*>(f.ptr);
    }
    return "";
}

} // namespace

double RunConfig::net_lr(int net) const {
    double v = net_learning_rate.at(static_cast<size_t>(net - 1));
    return v > 0.0 ? v : learning_rate;
}

void RunConfig::validate() const {
    auto positive = [](const char* key, auto v) {
        if (!(v > 0)) bad(std::string(key) + " must be positive");
    };
    positive("seed", seed);
    positive("learning_rate", learning_rate);
    positive("batch_size", batch_size);
    positive("max_epochs", max_epochs);
    positive("patience", patience);
    positive("n_pos", n_pos);
    positive("n_neg", n_neg);
    positive("val_pos", val_pos);
    positive("val_neg", val_neg);
    positive("gen_learning_rate", gen_learning_rate);
    positive("gen_batch_size", gen_batch_size);
    positive("gen_max_epochs", gen_max_epochs);
    positive("gen_patience", gen_patience);
    positive("test_families", test_families);
    positive("val_families", val_families);
    positive("homogeneity_pairs", homogeneity_pairs);
    if (!(momentum >= 0.0 && momentum < 1.0)) bad("momentum must lie in [0,1)");
    if (!(gen_momentum >= 0.0 && gen_momentum < 1.0)) bad("gen_momentum must lie in [0,1)");
    if (arch.empty()) bad("arch must not be empty");
    resolve_arch(arch);
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    auto refs = fields(cfg);
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            bad("line " + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) bad("line " + std::to_string(line_no) + ": empty key");
        if (!seen.insert(key).second)
            bad("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        bool matched = false;
        for (const FieldRef& f : refs) {
            if (key == f.key) {
                assign(f, value);
                matched = true;
                break;
            }
        }
        if (!matched) bad("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string serialize_config(const RunConfig& cfg) {
    RunConfig copy = cfg;
    std::string out;
    for (const FieldRef& f : fields(copy)) {
        out += f.key;
        out += '=';
        out += render(f);
        out += '\n';
    }
    return out;
}

} // namespace glyphforge
