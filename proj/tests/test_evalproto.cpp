#include "doctest.h"

#include <filesystem>

#include "fixture.hpp"
#include "glyphforge/bytes.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/evalproto.hpp"

using namespace glyphforge;
using gftest::rigged_judge;
using gftest::small_atlas;

namespace {

EnsembleModel fixed_ensemble(float bias) {
    EnsembleModel e;
    for (int k = 0; k < 3; ++k)
        e.members.push_back(rigged_judge(bias));
    return e;
}

} // namespace

TEST_CASE("pixel sse on hand-built images") {
    GlyphImage black, white;
    black.pixels.fill(0);
    white.pixels.fill(255);
    CHECK(sse(black, black) == 0.0);
    CHECK(sse(black, white) == doctest::Approx(1296.0));
    GlyphImage one = black;
    one.pixels[300] = 51;
    CHECK(sse(black, one) == doctest::Approx(0.04));
}

TEST_CASE("protocol names") {
    CHECK(std::string(protocol_name(Protocol::orig_basis_synth_test)) == "orig_synth");
    CHECK(std::string(protocol_name(Protocol::synth_basis_orig_test)) == "synth_orig");
    CHECK(std::string(protocol_name(Protocol::synth_basis_synth_test)) == "synth_synth");
    CHECK(std::string(protocol_name(Protocol::baseline)) == "baseline");
}

TEST_CASE("ground-truth passthrough makes every protocol the baseline") {
    Atlas test = small_atlas(3, 1);
    EnsembleModel disc = fixed_ensemble(2.0f);
    EvalReport report = evaluate_protocols(disc, ground_truth_generator(), test);

    REQUIRE(report.rows.size() == 22);
    for (const EvalRow& row : report.rows) {
        CHECK(row.sse_mean == 0.0);
        CHECK(row.orig_synth == row.baseline);
        CHECK(row.synth_orig == row.baseline);
        CHECK(row.synth_synth == row.baseline);
    }
    // per-decision equality, not just equal rates
    REQUIRE(report.decisions.size() == 3u * 22u * 4u);
    for (size_t i = 0; i < report.decisions.size(); i += 4) {
        bool base = report.decisions[i + 3].judged_same;
        for (int p = 0; p < 3; ++p)
            CHECK(report.decisions[i + p].judged_same == base);
    }
}

TEST_CASE("rigged ensembles pin the protocol rates") {
    Atlas test = small_atlas(2, 1);
    EvalReport always_same =
        evaluate_protocols(fixed_ensemble(3.0f), ground_truth_generator(), test);
    CHECK(always_same.average.letter == '*');
    CHECK(always_same.average.baseline == doctest::Approx(1.0));
    CHECK(always_same.average.orig_synth == doctest::Approx(1.0));

    EvalReport always_diff =
        evaluate_protocols(fixed_ensemble(-3.0f), ground_truth_generator(), test);
    CHECK(always_diff.average.baseline == doctest::Approx(0.0));
    CHECK(always_diff.average.synth_synth == doctest::Approx(0.0));
}

TEST_CASE("decision log is ordered font, letter, protocol") {
    Atlas test = small_atlas(2, 1);
    EvalReport report =
        evaluate_protocols(fixed_ensemble(1.0f), ground_truth_generator(), test);
    auto letters = non_basis_letters();
    REQUIRE(report.decisions.size() == 2u * letters.size() * 4u);
    size_t i = 0;
    for (int f = 0; f < 2; ++f) {
        for (char L : letters) {
            for (int p = 0; p < 4; ++p, ++i) {
                CHECK(report.decisions[i].font == test.fonts[f].name);
                CHECK(report.decisions[i].letter == L);
                CHECK(report.decisions[i].protocol == static_cast<Protocol>(p));
            }
        }
    }
}

TEST_CASE("evaluation rejects empty inputs") {
    Atlas test = small_atlas(2, 1);
    EnsembleModel empty;
    CHECK_THROWS_AS(evaluate_protocols(empty, ground_truth_generator(), test), Error);
    CHECK_THROWS_AS(evaluate_protocols(fixed_ensemble(1.0f), ground_truth_generator(), Atlas{}),
                    Error);
}

TEST_CASE("eval csv carries 22 letter rows plus the average") {
    Atlas test = small_atlas(2, 1);
    EvalReport report =
        evaluate_protocols(fixed_ensemble(1.0f), ground_truth_generator(), test);
    auto dir = std::filesystem::temp_directory_path();
    auto eval_path = dir / "gf_eval.csv";
    auto dec_path = dir / "gf_decisions.csv";
    write_eval_csv(eval_path.string(), report);
    write_decision_csv(dec_path.string(), report);

    std::string eval_text = read_text_file(eval_path);
    CHECK(eval_text.rfind("letter,sse,orig_synth,synth_orig,synth_synth,baseline\n", 0) == 0);
    CHECK(std::count(eval_text.begin(), eval_text.end(), '\n') == 1 + 22 + 1);
    CHECK(eval_text.find("\n*,") != std::string::npos);

    std::string dec_text = read_text_file(dec_path);
    CHECK(dec_text.rfind("font,letter,protocol,judged_same\n", 0) == 0);
    CHECK(std::count(dec_text.begin(), dec_text.end(), '\n') ==
          1 + static_cast<long>(report.decisions.size()));
    std::filesystem::remove(eval_path);
    std::filesystem::remove(dec_path);
}

TEST_CASE("homogeneity sources mirror the atlas") {
    Atlas atlas = small_atlas(3, 2);
    auto src = homogeneity_source_from_atlas(atlas);
    REQUIRE(src.size() == atlas.fonts.size());
    for (size_t i = 0; i < src.size(); ++i) {
        CHECK(src[i].name == atlas.fonts[i].name);
        CHECK(src[i].family_key == atlas.fonts[i].family_key);
        CHECK(src[i].glyphs[5].pixels == atlas.fonts[i].glyphs[5].pixels);
    }
}

TEST_CASE("homogeneity rate is exact for rigged judges") {
    Atlas atlas = small_atlas(4, 1);
    auto fonts = homogeneity_source_from_atlas(atlas);
    HomogeneityResult all_diff =
        homogeneity_test(fixed_ensemble(-2.0f), fonts, 500, 9, "original");
    CHECK(all_diff.n_pairs == 500);
    CHECK(all_diff.detection_rate == 1.0);
    CHECK(all_diff.mode == "original");

    HomogeneityResult none =
        homogeneity_test(fixed_ensemble(2.0f), fonts, 500, 9, "synthetic");
    CHECK(none.detection_rate == 0.0);
}

TEST_CASE("homogeneity rejects degenerate setups") {
    Atlas atlas = small_atlas(4, 1);
    auto fonts = homogeneity_source_from_atlas(atlas);
    CHECK_THROWS_AS(homogeneity_test(EnsembleModel{}, fonts, 10, 1, "x"), Error);
    CHECK_THROWS_AS(homogeneity_test(fixed_ensemble(1.0f), fonts, 0, 1, "x"), Error);
    auto lone = homogeneity_source_from_atlas(small_atlas(1, 3));
    CHECK_THROWS_AS(homogeneity_test(fixed_ensemble(1.0f), lone, 10, 1, "x"), Error);
}

TEST_CASE("homogeneity draws are deterministic in the seed") {
    // A judge that keys on the candidate's mean brightness gives a rate
    // strictly between 0 and 1, so reruns genuinely exercise sampling.
    Atlas atlas = small_atlas(6, 1);
    for (size_t f = 0; f < atlas.fonts.size(); ++f)
        for (auto& g : atlas.fonts[f].glyphs)
            for (auto& p : g.pixels)
                p = static_cast<std::uint8_t>(f * 40 + p % 40);
    auto fonts = homogeneity_source_from_atlas(atlas);

    // one member keyed on input brightness: weight on every candidate pixel
    Model keyed = build_model<float>("towers=fc(1);agg=fc(1);out=fc(1),logistic");
    std::fill(keyed.weights.begin(), keyed.weights.end(), 0.0f);
    for (const Node& n : keyed.nodes) {
        if (n.name == "tower4/fc1")
            for (size_t j = 0; j < n.w_len; ++j)
                keyed.weights[n.w_off + j] = 0.02f;
        if (n.name == "agg/fc1")
            keyed.weights[n.w_off + 4] = 1.0f;
        if (n.name == "head0/fc1") {
            keyed.weights[n.w_off] = 1.0f;
            keyed.weights[n.b_off] = -10.0f;
        }
    }
    EnsembleModel e;
    e.members.push_back(keyed);

    HomogeneityResult a = homogeneity_test(e, fonts, 400, 21, "original");
    HomogeneityResult b = homogeneity_test(e, fonts, 400, 21, "original");
    CHECK(a.detection_rate == b.detection_rate);
    CHECK(a.detection_rate > 0.0);
    CHECK(a.detection_rate < 1.0);
    HomogeneityResult c = homogeneity_test(e, fonts, 400, 22, "original");
    CHECK(c.detection_rate != a.detection_rate);
}
