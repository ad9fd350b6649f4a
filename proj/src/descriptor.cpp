#include "glyphforge/descriptor.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "glyphforge/error.hpp"

namespace glyphforge {
namespace {

class DescParser {
  public:
    explicit DescParser(const std::string& text) : s_(text) {}

    ArchDescriptor parse() {
        ArchDescriptor d;
        skip_spaces();
        if (peek_key("in")) {
            expect_key("in");
            d.inputs = parse_int(1, 26, "input count");
            expect(';');
        }
        if (peek_key("heads")) {
            expect_key("heads");
            d.heads = parse_int(1, 26, "head count");
            expect(';');
        }
        if (peek_key("letter")) {
            expect_key("letter");
            skip_spaces();
            char c = peek();
            if (c < 'A' || c > 'Z')
                error("letter must be A-Z");
            d.letter = c;
            ++pos_;
            expect(';');
        }
        expect_key("towers");
        d.towers = parse_layers(false);
        expect(';');
        expect_key("agg");
        d.agg = parse_layers(false);
        expect(';');
        expect_key("out");
        d.out = parse_layers(false);
        skip_spaces();
        if (pos_ != s_.size())
            error("unexpected trailing text");
        if (d.out.empty())
            error("output stage must have at least one layer");
        return d;
    }

  private:
    [[noreturn]] void error(const std::string& msg) const {
        fail(ErrorKind::format,
             "descriptor: " + msg + " (at position " + std::to_string(pos_) + ")");
    }

    void skip_spaces() {
        while (pos_ < s_.size() && s_[pos_] == ' ')
            ++pos_;
    }

    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    void expect(char c) {
        skip_spaces();
        if (peek() != c)
            error(std::string("expected '") + c + "'");
        ++pos_;
    }

    bool peek_key(const std::string& key) {
        skip_spaces();
        return s_.compare(pos_, key.size() + 1, key + "=") == 0;
    }

    void expect_key(const std::string& key) {
        skip_spaces();
        if (!peek_key(key))
            error("expected '" + key + "='");
        pos_ += key.size() + 1;
    }

    std::string parse_word() {
        skip_spaces();
        size_t start = pos_;
        while (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) != 0))
            ++pos_;
        if (pos_ == start)
            error("expected a layer name");
        return s_.substr(start, pos_ - start);
    }

    int parse_int(int lo, int hi, const char* what) {
        skip_spaces();
        size_t start = pos_;
        long long value = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])) != 0) {
            value = value * 10 + (s_[pos_] - '0');
            if (value > 1000000000LL)
                error(std::string(what) + " is out of range");
            ++pos_;
        }
        if (pos_ == start)
            error(std::string("expected ") + what);
        if (value < lo || value > hi)
            error(std::string(what) + " must be in [" + std::to_string(lo) + "," +
                  std::to_string(hi) + "]");
        return static_cast<int>(value);
    }

    LayerSpec parse_layer(bool inside_paths) {
        LayerSpec layer;
        std::string word = parse_word();
        if (word == "fc") {
            layer.op = LayerOp::fc;
            expect('(');
            layer.units = parse_int(1, 100000000, "unit count");
            expect(')');
        } else if (word == "conv") {
            layer.op = LayerOp::conv;
            expect('(');
            int kh = parse_int(1, 35, "kernel size");
            expect('x');
            int kw = parse_int(1, 35, "kernel size");
            if (kh != kw)
                error("conv kernel must be square");
            layer.kernel = kh;
            expect(',');
            layer.channels = parse_int(1, 4096, "channel count");
            expect(')');
        } else if (word == "pool") {
            layer.op = LayerOp::pool;
            expect('(');
            layer.pool = parse_int(2, 2, "pool size");
            expect(')');
        } else if (word == "relu") {
            layer.op = LayerOp::relu;
        } else if (word == "logistic") {
            layer.op = LayerOp::logistic;
        } else if (word == "patchout") {
            layer.op = LayerOp::patchout;
            expect('(');
            layer.patch_sizes.push_back(parse_int(3, 4, "patch size"));
            skip_spaces();
            if (peek() == '+') {
                ++pos_;
                layer.patch_sizes.push_back(parse_int(3, 4, "patch size"));
                if (layer.patch_sizes[0] == layer.patch_sizes[1])
                    error("duplicate patch size");
            }
            expect(',');
            layer.out_h = parse_int(1, 4096, "output height");
            expect('x');
            layer.out_w = parse_int(1, 4096, "output width");
            expect(')');
            if (layer.out_h != 36 || layer.out_w != 36)
                error("patch output must be 36x36");
        } else if (word == "paths") {
            if (inside_paths)
                error("nested paths are not supported");
            layer.op = LayerOp::paths;
            expect('[');
            while (true) {
                expect('(');
                layer.paths.push_back(parse_layers(true));
                expect(')');
                skip_spaces();
                if (peek() == '|') {
                    ++pos_;
                    continue;
                }
                break;
            }
            expect(']');
            if (layer.paths.empty())
                error("paths needs at least one branch");
        } else {
            pos_ -= word.size();
            error("unknown layer '" + word + "'");
        }
        return layer;
    }

    std::vector<LayerSpec> parse_layers(bool inside_paths) {
        std::vector<LayerSpec> layers;
        while (true) {
            skip_spaces();
            char c = peek();
            if (c == ';' || c == ')' || c == '\0')
                break;
            if (!layers.empty())
                expect(',');
            layers.push_back(parse_layer(inside_paths));
            skip_spaces();
            c = peek();
            if (c != ',' && c != ';' && c != ')' && c != '\0')
                error("expected ',' or end of layer list");
        }
        return layers;
    }

    const std::string& s_;
    size_t pos_ = 0;
};

void append_layer_text(std::string& out, const LayerSpec& layer) {
    char buf[64];
    switch (layer.op) {
    case LayerOp::fc:
        std::snprintf(buf, sizeof buf, "fc(%d)", layer.units);
        out += buf;
        break;
    case LayerOp::conv:
        std::snprintf(buf, sizeof buf, "conv(%dx%d,%d)", layer.kernel, layer.kernel,
                      layer.channels);
        out += buf;
        break;
    case LayerOp::pool:
        std::snprintf(buf, sizeof buf, "pool(%d)", layer.pool);
        out += buf;
        break;
    case LayerOp::relu:
        out += "relu";
        break;
    case LayerOp::logistic:
        out += "logistic";
        break;
    case LayerOp::patchout:
        out += "patchout(";
        for (size_t i = 0; i < layer.patch_sizes.size(); ++i) {
            if (i > 0)
                out += '+';
            out += std::to_string(layer.patch_sizes[i]);
        }
        std::snprintf(buf, sizeof buf, ",%dx%d)", layer.out_h, layer.out_w);
        out += buf;
        break;
    case LayerOp::paths:
        out += "paths[";
        for (size_t p = 0; p < layer.paths.size(); ++p) {
            if (p > 0)
                out += '|';
            out += '(';
            for (size_t i = 0; i < layer.paths[p].size(); ++i) {
                if (i > 0)
                    out += ',';
                append_layer_text(out, layer.paths[p][i]);
            }
            out += ')';
        }
        out += ']';
        break;
    }
}

void append_layers_text(std::string& out, const std::vector<LayerSpec>& layers) {
    for (size_t i = 0; i < layers.size(); ++i) {
        if (i > 0)
            out += ',';
        append_layer_text(out, layers[i]);
    }
}

int scaled_width(int n, double factor) {
    long long scaled = std::llround(n * factor);
    return static_cast<int>(std::max(1LL, scaled));
}

LayerSpec scale_layer(const LayerSpec& layer, double factor) {
    LayerSpec out = layer;
    if (layer.op == LayerOp::fc)
        out.units = scaled_width(layer.units, factor);
    else if (layer.op == LayerOp::conv)
        out.channels = scaled_width(layer.channels, factor);
    else if (layer.op == LayerOp::paths)
        for (auto& path : out.paths)
            for (auto& l : path)
                l = scale_layer(l, factor);
    return out;
}

const char* kConvTower = "paths[(conv(3x3,8),relu,pool(2),conv(3x3,8),relu,pool(2))"
                         "|(conv(4x4,8),relu,pool(2),conv(3x3,8),relu,pool(2))]";

struct Preset {
    const char* name;
    std::string descriptor;
    long long reference_params;
};

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = [] {
        std::vector<Preset> t;
        t.push_back({"net1",
                     "towers=fc(50),relu;agg=fc(250),relu,fc(200),relu;out=fc(1),logistic",
                     437602});
        t.push_back({"net2",
                     "towers=fc(50),relu,fc(50),relu,fc(50),relu;"
                     "agg=fc(250),relu,fc(200),relu;out=fc(1),logistic",
                     463102});
        t.push_back({"net3",
                     "towers=fc(100),relu,fc(100),relu,fc(100),relu;"
                     "agg=fc(250),relu,fc(200),relu;out=fc(1),logistic",
                     925352});
        t.push_back({"net4",
                     "towers=fc(100),relu,fc(100),relu,fc(100),relu;"
                     "agg=fc(50),relu,fc(50),relu;out=fc(1),logistic",
                     777202});
        t.push_back({"net5",
                     std::string("towers=") + kConvTower +
                         ";agg=fc(50),relu,fc(50),relu;out=fc(1),logistic",
                     216952});
        t.push_back({"net6",
                     std::string("towers=") + kConvTower +
                         ";agg=fc(50),relu,fc(50),relu,fc(50),relu,fc(50),relu;"
                         "out=fc(1),logistic",
                     222052});
        t.push_back({"net7",
                     std::string("towers=") + kConvTower +
                         ";agg=fc(10),relu,fc(10),relu,fc(10),relu,fc(10),relu;"
                         "out=fc(1),logistic",
                     52612});
        t.push_back({"gen-single",
                     "in=4;towers=fc(50),relu;agg=fc(250),relu,fc(200),relu;"
                     "out=fc(120),relu,patchout(3+4,36x36),logistic",
                     0});
        t.push_back({"gen-multi",
                     "in=4;heads=26;towers=fc(50),relu;agg=fc(250),relu,fc(200),relu;"
                     "out=fc(120),relu,patchout(3+4,36x36),logistic",
                     0});
        return t;
    }();
    return table;
}

const Preset* find_preset(const std::string& name) {
    for (const Preset& p : presets())
        if (name == p.name)
            return &p;
    return nullptr;
}

} // namespace

std::string ArchDescriptor::canonical() const {
    std::string out;
    if (inputs != 5)
        out += "in=" + std::to_string(inputs) + ";";
    if (heads != 1)
        out += "heads=" + std::to_string(heads) + ";";
    if (letter != 0) {
        out += "letter=";
        out += letter;
        out += ';';
    }
    out += "towers=";
    append_layers_text(out, towers);
    out += ";agg=";
    append_layers_text(out, agg);
    out += ";out=";
    append_layers_text(out, this->out);
    return out;
}

ArchDescriptor parse_descriptor(const std::string& text) { return DescParser(text).parse(); }

bool is_preset_arch(const std::string& name) { return find_preset(name) != nullptr; }

std::string preset_descriptor(const std::string& name) {
    const Preset* p = find_preset(name);
    if (!p)
        fail(ErrorKind::invalid_argument, "unknown architecture preset '" + name + "'");
    return p->descriptor;
}

long long preset_reference_params(const std::string& name) {
    const Preset* p = find_preset(name);
    if (!p)
        fail(ErrorKind::invalid_argument, "unknown architecture preset '" + name + "'");
    return p->reference_params;
}

std::vector<std::string> preset_arch_names() {
    std::vector<std::string> names;
    for (const Preset& p : presets())
        names.push_back(p.name);
    return names;
}

ArchDescriptor resolve_arch(const std::string& arch) {
    if (arch.find('=') != std::string::npos)
        return parse_descriptor(arch);
    const Preset* p = find_preset(arch);
    if (p)
        return parse_descriptor(p->descriptor);
    std::string names;
    for (const std::string& n : preset_arch_names()) {
        if (!names.empty())
            names += ", ";
        names += n;
    }
    fail(ErrorKind::invalid_argument,
         "unknown architecture '" + arch + "' (presets: " + names + ", or a descriptor string)");
}

ArchDescriptor width_scaled(const ArchDescriptor& desc, double factor) {
    if (factor <= 0.0)
        fail(ErrorKind::invalid_argument, "width scale factor must be positive");
    ArchDescriptor out = desc;
    for (auto& l : out.towers)
        l = scale_layer(l, factor);
    for (auto& l : out.agg)
        l = scale_layer(l, factor);
    for (auto& l : out.out)
        l = scale_layer(l, factor);
    return out;
}

} // namespace glyphforge
