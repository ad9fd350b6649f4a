#include "glyphforge/pipeline.hpp"

#include <openssl/evp.h>

#include <cstdio>

#include "glyphforge/atlas.hpp"
#include "glyphforge/bytes.hpp"
#include "glyphforge/descriptor.hpp"
#include "glyphforge/discriminator.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/evalproto.hpp"
#include "glyphforge/generator.hpp"
#include "glyphforge/model.hpp"
#include "glyphforge/raster.hpp"
#include "glyphforge/rng.hpp"

namespace glyphforge {

std::string sha256_hex(const void* data, std::size_t n) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data, n, digest, &len, EVP_sha256(), nullptr) != 1)
        fail(ErrorKind::io, "sha256 digest failed");
    static const char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string sha256_hex(const std::string& text) { return sha256_hex(text.data(), text.size()); }

std::string sha256_file(const std::filesystem::path& path) {
    std::vector<std::uint8_t> data = read_file_bytes(path);
    return sha256_hex(data.data(), data.size());
}

namespace {

template <typename Fn>
auto stage(const std::string& name, const std::function<void(const std::string&)>& progress, Fn&& fn) {
    if (progress) progress(name);
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), "stage '" + name + "': " + e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorKind::io, "stage '" + name + "': " + e.what());
    }
}

TrainOptions disc_options(const RunConfig& cfg, int net) {
    TrainOptions opt;
    opt.seed = mix64(cfg.seed ^ (0x6e657400ull + static_cast<uint64_t>(net)));
    opt.learning_rate = cfg.net_lr(net);
    opt.momentum = cfg.momentum;
    opt.batch_size = cfg.batch_size;
    opt.max_epochs = cfg.max_epochs;
    opt.patience = cfg.patience;
    return opt;
}

TrainOptions gen_options(const RunConfig& cfg) {
    TrainOptions opt;
    opt.seed = cfg.seed;
    opt.learning_rate = cfg.gen_learning_rate;
    opt.momentum = cfg.gen_momentum;
    opt.batch_size = cfg.gen_batch_size;
    opt.max_epochs = cfg.gen_max_epochs;
    opt.patience = cfg.gen_patience;
    return opt;
}

} // namespace

PipelineResult run_pipeline(const RunConfig& cfg, const std::filesystem::path& fonts_dir,
                            const std::filesystem::path& workdir,
                            const std::function<void(const std::string&)>& progress) {
    cfg.validate();
    std::filesystem::create_directories(workdir);
    auto at = [&](const std::string& name) { return workdir / name; };

    std::string config_text = serialize_config(cfg);
    write_text_file(at("config.txt"), config_text);

    Atlas corpus = stage("build-corpus", progress, [&] {
        std::vector<RejectEntry> rejects;
        Atlas atlas = build_atlas(collect_font_files(fonts_dir.string()), &rejects);
        std::string log;
        for (const RejectEntry& r : rejects)
            log += r.path + "\t" + std::to_string(r.face_index) + "\t" + r.reason + "\n";
        write_text_file(at("rejects.tsv"), log);
        save_atlas(atlas, at("corpus.fga"));
        return atlas;
    });

    CorpusSplit outer = stage("split-test", progress, [&] {
        CorpusSplit s = split_corpus(corpus, cfg.test_families, cfg.seed);
        save_atlas(s.test, at("test.fga"));
        return s;
    });

    CorpusSplit inner = stage("split-val", progress, [&] {
        CorpusSplit s = split_corpus(outer.train, cfg.val_families, mix64(cfg.seed + 1));
        save_atlas(s.train, at("train.fga"));
        save_atlas(s.test, at("val.fga"));
        return s;
    });
    const Atlas& train_atlas = inner.train;
    const Atlas& val_atlas = inner.test;

    std::vector<PairExample> train_set = stage("train-pairs", progress, [&] {
        return make_dataset(train_atlas, cfg.n_pos, cfg.n_neg, mix64(cfg.seed ^ 0x70616972u));
    });
    std::vector<PairExample> val_set = stage("val-pairs", progress, [&] {
        return make_dataset(val_atlas, cfg.val_pos, cfg.val_neg, mix64(cfg.seed ^ 0x76616c70u));
    });

    EnsembleModel ensemble;
    for (int k = 1; k <= 7; ++k) {
        std::string arch = "net" + std::to_string(k);
        Model m = stage("train-disc-" + arch, progress, [&] {
            std::vector<EpochStat> log;
            Model trained = train_discriminator(resolve_arch(arch), train_atlas, train_set,
                                                val_atlas, val_set, disc_options(cfg, k), &log);
            save_model(trained, at("disc_" + arch + ".fgm").string());
            write_metric_csv(at("disc_" + arch + "_metrics.csv").string(),
                             "epoch,train_loss,val_accuracy", log);
            return trained;
        });
        ensemble.members.push_back(std::move(m));
    }

    Model gen = stage("train-gen", progress, [&] {
        std::vector<GenEpochStat> log;
        Model trained = train_generator(resolve_arch("gen-multi"), train_atlas, val_atlas,
                                        gen_options(cfg), &log);
        save_model(trained, at("gen_multi.fgm").string());
        write_gen_metric_csv(at("gen_metrics.csv").string(), trained, log);
        return trained;
    });

    stage("eval", progress, [&] {
        EvalReport report = evaluate_protocols(ensemble, model_generator(gen), outer.test);
        write_eval_csv(at("report.csv").string(), report);
        write_decision_csv(at("decisions.csv").string(), report);
        return 0;
    });

    stage("homogeneity", progress, [&] {
        auto original = homogeneity_source_from_atlas(outer.test);
        auto synthetic = homogeneity_source_generated(gen, outer.test);
        uint64_t seed = mix64(cfg.seed ^ 0x686f6d6fu);
        HomogeneityResult orig = homogeneity_test(ensemble, original, cfg.homogeneity_pairs, seed, "original");
        HomogeneityResult synth = homogeneity_test(ensemble, synthetic, cfg.homogeneity_pairs, seed, "synthetic");
        char buf[128];
        std::string text = "mode,pairs,detection_rate\n";
        std::snprintf(buf, sizeof(buf), "original,%lld,%.9g\n", orig.n_pairs, orig.detection_rate);
        text += buf;
        std::snprintf(buf, sizeof(buf), "synthetic,%lld,%.9g\n", synth.n_pairs, synth.detection_rate);
        text += buf;
        write_text_file(at("homogeneity.csv"), text);
        return 0;
    });

    PipelineResult result;
    result.manifest_path = at("manifest.tsv");
    stage("manifest", progress, [&] {
        std::vector<std::string> keys = {"config.txt", "corpus.fga",  "train.fga",
                                         "val.fga",    "test.fga",    "rejects.tsv"};
        for (int k = 1; k <= 7; ++k) {
            keys.push_back("disc_net" + std::to_string(k) + ".fgm");
            keys.push_back("disc_net" + std::to_string(k) + "_metrics.csv");
        }
        keys.insert(keys.end(), {"gen_multi.fgm", "gen_metrics.csv", "report.csv",
                                 "decisions.csv", "homogeneity.csv"});
        std::string text;
        for (const std::string& key : keys) {
            std::string digest = sha256_file(at(key));
            result.manifest.emplace_back(key, digest);
            text += key + "\t" + digest + "\n";
        }
        write_text_file(result.manifest_path, text);
        return 0;
    });

    return result;
}

} // namespace glyphforge
