#include <algorithm>
#include <array>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glyphforge/atlas.hpp"
#include "glyphforge/bytes.hpp"
#include "glyphforge/config.hpp"
#include "glyphforge/descriptor.hpp"
#include "glyphforge/discriminator.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/evalproto.hpp"
#include "glyphforge/generator.hpp"
#include "glyphforge/model.hpp"
#include "glyphforge/parallel.hpp"
#include "glyphforge/pipeline.hpp"
#include "glyphforge/raster.hpp"
#include "glyphforge/sheet.hpp"

namespace gf = glyphforge;

namespace {

const char* kind_label(gf::NodeKind k) {
    switch (k) {
    case gf::NodeKind::input: return "input";
    case gf::NodeKind::fc: return "fc";
    case gf::NodeKind::conv: return "conv";
    case gf::NodeKind::pool: return "pool";
    case gf::NodeKind::relu: return "relu";
    case gf::NodeKind::logistic: return "logistic";
    case gf::NodeKind::concat: return "concat";
    case gf::NodeKind::add: return "add";
    case gf::NodeKind::local_patch: return "local_patch";
    }
    return "?";
}

gf::EnsembleModel load_ensemble(const std::vector<std::string>& paths) {
    gf::EnsembleModel e;
    for (const std::string& p : paths) e.members.push_back(gf::load_model(p));
    if (e.members.size() % 2 == 0)
        gf::fail(gf::ErrorKind::configuration,
                 "ensemble needs an odd member count, got " + std::to_string(e.members.size()));
    return e;
}

const gf::FontRecord& find_font(const gf::Atlas& atlas, const std::string& name) {
    const gf::FontRecord* rec = atlas.find(name);
    if (!rec) gf::fail(gf::ErrorKind::invalid_argument, "font not found in atlas: " + name);
    return *rec;
}

gf::TrainOptions disc_options(const gf::RunConfig& cfg, const std::string& arch) {
    gf::TrainOptions opt;
    opt.seed = cfg.seed;
    opt.learning_rate = cfg.learning_rate;
    if (arch.size() == 4 && arch.rfind("net", 0) == 0 && arch[3] >= '1' && arch[3] <= '7')
        opt.learning_rate = cfg.net_lr(arch[3] - '0');
    opt.momentum = cfg.momentum;
    opt.batch_size = cfg.batch_size;
    opt.max_epochs = cfg.max_epochs;
    opt.patience = cfg.patience;
    return opt;
}

gf::TrainOptions gen_options(const gf::RunConfig& cfg) {
    gf::TrainOptions opt;
    opt.seed = cfg.seed;
    opt.learning_rate = cfg.gen_learning_rate;
    opt.momentum = cfg.gen_momentum;
    opt.batch_size = cfg.gen_batch_size;
    opt.max_epochs = cfg.gen_max_epochs;
    opt.patience = cfg.gen_patience;
    return opt;
}

std::vector<gf::SheetRow> font_rows(const std::string& label_a, const std::array<gf::GlyphImage, 26>& a,
                                    const std::string& label_b, const std::array<gf::GlyphImage, 26>& b) {
    gf::SheetRow ra{label_a, {a.begin(), a.end()}};
    gf::SheetRow rb{label_b, {b.begin(), b.end()}};
    return {ra, rb};
}

int run(int argc, char** argv) {
    CLI::App app{"glyph style transfer toolkit"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "cap worker threads (default: all cores)");

    std::string cfg_path;
    gf::RunConfig cfg;

    // build-corpus
    auto* c_corpus = app.add_subcommand("build-corpus", "rasterize a font directory into an atlas");
    std::string fonts_dir, out_path, reject_log;
    c_corpus->add_option("--fonts", fonts_dir, "font directory")->required();
    c_corpus->add_option("--out", out_path, "output atlas file")->required();
    c_corpus->add_option("--reject-log", reject_log, "write rejected faces here");

    // split
    auto* c_split = app.add_subcommand("split", "family-exclusive train/test split");
    std::string atlas_path, train_out, test_out;
    int test_families = 0;
    uint64_t seed = 1;
    c_split->add_option("--atlas", atlas_path)->required();
    c_split->add_option("--test-families", test_families)->required();
    c_split->add_option("--seed", seed)->required();
    c_split->add_option("--train", train_out)->required();
    c_split->add_option("--test", test_out)->required();

    // train-disc
    auto* c_tdisc = app.add_subcommand("train-disc", "train one same-font discriminator");
    std::string arch = "net1", train_atlas_path, val_atlas_path, model_out, metrics_out;
    c_tdisc->add_option("--arch", arch, "preset name or descriptor text");
    c_tdisc->add_option("--train", train_atlas_path)->required();
    c_tdisc->add_option("--val", val_atlas_path)->required();
    c_tdisc->add_option("--config", cfg_path);
    c_tdisc->add_option("--out", model_out)->required();
    c_tdisc->add_option("--metrics", metrics_out, "per-epoch CSV log");

    // ensemble
    auto* c_ens = app.add_subcommand("ensemble", "vote-distribution report over labeled pairs");
    std::vector<std::string> model_paths;
    std::string eval_atlas_path, report_out;
    c_ens->add_option("--models", model_paths, "member model files")->required()->expected(-1);
    c_ens->add_option("--eval", eval_atlas_path)->required();
    c_ens->add_option("--report", report_out)->required();
    c_ens->add_option("--config", cfg_path);

    // train-gen
    auto* c_tgen = app.add_subcommand("train-gen", "train a glyph generator");
    std::string mode = "multi", letter = "R";
    c_tgen->add_option("--mode", mode)->check(CLI::IsMember({"single", "multi"}));
    c_tgen->add_option("--letter", letter, "target letter in single mode");
    c_tgen->add_option("--train", train_atlas_path)->required();
    c_tgen->add_option("--val", val_atlas_path)->required();
    c_tgen->add_option("--config", cfg_path);
    c_tgen->add_option("--out", model_out)->required();
    c_tgen->add_option("--metrics", metrics_out, "per-epoch CSV log");

    // generate
    auto* c_gen = app.add_subcommand("generate", "synthesize a font and render original vs output");
    std::string gen_model_path, font_name;
    c_gen->add_option("--model", gen_model_path)->required();
    c_gen->add_option("--atlas", atlas_path)->required();
    c_gen->add_option("--font", font_name)->required();
    c_gen->add_option("--out", out_path, "contact sheet (PGM)")->required();

    // combine
    auto* c_comb = app.add_subcommand("combine", "mix basis glyphs of two fonts");
    std::string font_a, font_b;
    c_comb->add_option("--model", gen_model_path)->required();
    c_comb->add_option("--atlas", atlas_path)->required();
    c_comb->add_option("--font-a", font_a)->required();
    c_comb->add_option("--font-b", font_b)->required();
    c_comb->add_option("--out", out_path, "contact sheet (PGM)")->required();

    // eval
    auto* c_eval = app.add_subcommand("eval", "run the four same-font protocols");
    std::vector<std::string> disc_paths;
    std::string test_atlas_path, decisions_out;
    c_eval->add_option("--disc-ensemble", disc_paths)->required()->expected(-1);
    c_eval->add_option("--gen", gen_model_path)->required();
    c_eval->add_option("--test", test_atlas_path)->required();
    c_eval->add_option("--out", report_out)->required();
    c_eval->add_option("--decisions", decisions_out, "per-decision CSV");

    // homogeneity
    auto* c_hom = app.add_subcommand("homogeneity", "cross-font detection rate");
    std::string source = "atlas";
    long long pairs = 50000;
    c_hom->add_option("--disc-ensemble", disc_paths)->required()->expected(-1);
    c_hom->add_option("--source", source)->check(CLI::IsMember({"atlas", "generated"}));
    c_hom->add_option("--atlas", atlas_path)->required();
    c_hom->add_option("--gen", gen_model_path, "generator (required with --source generated)");
    c_hom->add_option("--pairs", pairs);
    c_hom->add_option("--seed", seed);
    c_hom->add_option("--out", out_path, "CSV output (default: stdout only)");

    // describe
    auto* c_desc = app.add_subcommand("describe", "layer table and parameter totals");
    c_desc->add_option("--arch", arch)->required();

    // gradcheck
    auto* c_grad = app.add_subcommand("gradcheck", "finite-difference gradient verification");
    double width_scale = 1.0;
    c_grad->add_option("--arch", arch)->required();
    c_grad->add_option("--width-scale", width_scale, "shrink layer widths by this factor");
    c_grad->add_option("--seed", seed);

    // pipeline
    auto* c_pipe = app.add_subcommand("pipeline", "corpus to manifest, end to end");
    std::string workdir;
    c_pipe->add_option("--fonts", fonts_dir)->required();
    c_pipe->add_option("--workdir", workdir)->required();
    c_pipe->add_option("--config", cfg_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (threads > 0) gf::set_thread_count(threads);
    if (!cfg_path.empty()) cfg = gf::load_config(cfg_path);

    if (app.got_subcommand(c_corpus)) {
        std::vector<gf::RejectEntry> rejects;
        gf::Atlas atlas = gf::build_atlas(gf::collect_font_files(fonts_dir), &rejects);
        if (!reject_log.empty()) {
            std::string log;
            for (const gf::RejectEntry& r : rejects)
                log += r.path + "\t" + std::to_string(r.face_index) + "\t" + r.reason + "\n";
            gf::write_text_file(reject_log, log);
        }
        gf::save_atlas(atlas, out_path);
        std::printf("fonts: %zu  rejected: %zu\n", atlas.fonts.size(), rejects.size());
        return 0;
    }

    if (app.got_subcommand(c_split)) {
        gf::CorpusSplit split = gf::split_corpus(gf::load_atlas(atlas_path), test_families, seed);
        gf::save_atlas(split.train, train_out);
        gf::save_atlas(split.test, test_out);
        std::printf("train fonts: %zu  test fonts: %zu\n", split.train.fonts.size(),
                    split.test.fonts.size());
        return 0;
    }

    if (app.got_subcommand(c_tdisc)) {
        gf::Atlas train_atlas = gf::load_atlas(train_atlas_path);
        gf::Atlas val_atlas = gf::load_atlas(val_atlas_path);
        auto train_set = gf::make_dataset(train_atlas, cfg.n_pos, cfg.n_neg, gf::mix64(cfg.seed ^ 0x70616972u));
        auto val_set = gf::make_dataset(val_atlas, cfg.val_pos, cfg.val_neg, gf::mix64(cfg.seed ^ 0x76616c70u));
        std::vector<gf::EpochStat> log;
        gf::Model m = gf::train_discriminator(gf::resolve_arch(arch), train_atlas, train_set,
                                              val_atlas, val_set, disc_options(cfg, arch), &log);
        gf::save_model(m, model_out);
        if (!metrics_out.empty())
            gf::write_metric_csv(metrics_out, "epoch,train_loss,val_accuracy", log);
        double best = 0.0;
        for (const gf::EpochStat& s : log) best = std::max(best, s.val_metric);
        std::printf("best val accuracy: %.4f over %zu epochs\n", best, log.size());
        return 0;
    }

    if (app.got_subcommand(c_ens)) {
        gf::EnsembleModel ens = load_ensemble(model_paths);
        gf::Atlas atlas = gf::load_atlas(eval_atlas_path);
        auto pairs_set = gf::make_dataset(atlas, cfg.val_pos, cfg.val_neg, gf::mix64(cfg.seed ^ 0x656e7370u));
        gf::VoteReport report = gf::vote_distribution(ens, atlas, pairs_set);
        gf::write_vote_csv(report_out, report);
        std::printf("ensemble accuracy: %.4f on %lld pairs\n", report.ensemble_accuracy, report.total);
        return 0;
    }

    if (app.got_subcommand(c_tgen)) {
        gf::Atlas train_atlas = gf::load_atlas(train_atlas_path);
        gf::Atlas val_atlas = gf::load_atlas(val_atlas_path);
        gf::ArchDescriptor desc;
        if (mode == "single") {
            if (letter.size() != 1) gf::fail(gf::ErrorKind::usage, "--letter wants a single capital");
            desc = gf::resolve_arch("gen-single");
            desc.letter = letter[0];
            gf::build_single_gen(letter[0], desc); // validates the choice early
        } else {
            desc = gf::resolve_arch("gen-multi");
        }
        std::vector<gf::GenEpochStat> log;
        gf::Model m = gf::train_generator(desc, train_atlas, val_atlas, gen_options(cfg), &log);
        gf::save_model(m, model_out);
        if (!metrics_out.empty()) gf::write_gen_metric_csv(metrics_out, m, log);
        double best = log.empty() ? 0.0 : log.front().val_mean_sse;
        for (const gf::GenEpochStat& s : log) best = std::min(best, s.val_mean_sse);
        std::printf("best val mean SSE: %.4f over %zu epochs\n", best, log.size());
        return 0;
    }

    if (app.got_subcommand(c_gen)) {
        gf::Model m = gf::load_model(gen_model_path);
        gf::Atlas atlas = gf::load_atlas(atlas_path);
        const gf::FontRecord& font = find_font(atlas, font_name);
        gf::GeneratedFont made = gf::generate_all(m, font);
        gf::write_contact_sheet(out_path, font_rows("original: " + font.name, font.glyphs,
                                                    "generated", made.glyphs));
        double total = 0.0;
        for (double s : made.sse) total += s;
        std::printf("sheet written: %s  (total SSE %.2f)\n", out_path.c_str(), total);
        return 0;
    }

    if (app.got_subcommand(c_comb)) {
        gf::Model m = gf::load_model(gen_model_path);
        gf::Atlas atlas = gf::load_atlas(atlas_path);
        const gf::FontRecord& a = find_font(atlas, font_a);
        const gf::FontRecord& b = find_font(atlas, font_b);
        gf::GeneratedFont made = gf::combine_fonts(m, a, b);
        std::vector<gf::SheetRow> rows = font_rows("font A: " + a.name, a.glyphs,
                                                   "font B: " + b.name, b.glyphs);
        rows.push_back({"combined: " + made.source_name, {made.glyphs.begin(), made.glyphs.end()}});
        gf::write_contact_sheet(out_path, rows);
        std::printf("sheet written: %s\n", out_path.c_str());
        return 0;
    }

    if (app.got_subcommand(c_eval)) {
        gf::EnsembleModel ens = load_ensemble(disc_paths);
        gf::Model gen = gf::load_model(gen_model_path);
        gf::Atlas test_atlas = gf::load_atlas(test_atlas_path);
        gf::EvalReport report = gf::evaluate_protocols(ens, gf::model_generator(gen), test_atlas);
        gf::write_eval_csv(report_out, report);
        if (!decisions_out.empty()) gf::write_decision_csv(decisions_out, report);
        std::printf("averages: sse %.2f  orig_synth %.3f  synth_orig %.3f  synth_synth %.3f  baseline %.3f\n",
                    report.average.sse_mean, report.average.orig_synth, report.average.synth_orig,
                    report.average.synth_synth, report.average.baseline);
        return 0;
    }

    if (app.got_subcommand(c_hom)) {
        gf::EnsembleModel ens = load_ensemble(disc_paths);
        gf::Atlas atlas = gf::load_atlas(atlas_path);
        std::vector<gf::HomogeneitySource> fonts;
        if (source == "generated") {
            if (gen_model_path.empty())
                gf::fail(gf::ErrorKind::usage, "--source generated needs --gen");
            gf::Model gen = gf::load_model(gen_model_path);
            fonts = gf::homogeneity_source_generated(gen, atlas);
        } else {
            fonts = gf::homogeneity_source_from_atlas(atlas);
        }
        std::string mode_name = source == "generated" ? "synthetic" : "original";
        gf::HomogeneityResult res = gf::homogeneity_test(ens, fonts, pairs, seed, mode_name);
        if (!out_path.empty()) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "mode,pairs,detection_rate\n%s,%lld,%.9g\n",
                          res.mode.c_str(), res.n_pairs, res.detection_rate);
            gf::write_text_file(out_path, buf);
        }
        std::printf("%s detection rate: %.4f over %lld pairs\n", res.mode.c_str(),
                    res.detection_rate, res.n_pairs);
        return 0;
    }

    if (app.got_subcommand(c_desc)) {
        gf::ArchDescriptor desc = gf::resolve_arch(arch);
        gf::Model m = gf::build_model<float>(desc);
        std::printf("%-28s %-12s %-14s %12s\n", "node", "kind", "output", "params");
        for (const gf::Node& n : m.nodes) {
            char shape[32];
            if (n.out_h == 1 && n.out_w == 1)
                std::snprintf(shape, sizeof(shape), "%d", n.out_c);
            else
                std::snprintf(shape, sizeof(shape), "%dx%dx%d", n.out_h, n.out_w, n.out_c);
            std::printf("%-28s %-12s %-14s %12zu\n", n.name.c_str(), kind_label(n.kind), shape,
                        n.w_len + n.b_len);
        }
        std::printf("total parameters: %zu\n", m.param_count());
        if (gf::is_preset_arch(arch)) {
            long long ref = gf::preset_reference_params(arch);
            if (ref > 0) {
                double dev = 100.0 * (static_cast<double>(m.param_count()) - ref) / ref;
                std::printf("reference total:  %lld (deviation %+.3f%%)\n", ref, dev);
            }
        }
        return 0;
    }

    if (app.got_subcommand(c_grad)) {
        gf::ArchDescriptor desc = gf::width_scaled(gf::resolve_arch(arch), width_scale);
        gf::Model probe = gf::build_model<float>(desc);
        std::printf("checking %zu parameters...\n", probe.param_count());
        double err = gf::grad_check_arch(desc, seed);
        std::printf("max relative error: %.3e  (%s)\n", err, err < 1e-4 ? "pass" : "FAIL");
        return err < 1e-4 ? 0 : 1;
    }

    if (app.got_subcommand(c_pipe)) {
        gf::PipelineResult res = gf::run_pipeline(cfg, fonts_dir, workdir, [](const std::string& s) {
            std::printf("[stage] %s\n", s.c_str());
            std::fflush(stdout);
        });
        std::printf("manifest: %s (%zu artifacts)\n", res.manifest_path.string().c_str(),
                    res.manifest.size());
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const gf::Error& e) {
        std::fprintf(stderr, "error (%s): %s\n", gf::to_string(e.kind()), e.what());
        return e.kind() == gf::ErrorKind::usage ? 2 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
