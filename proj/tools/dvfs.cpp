#include <filesystem>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "dvfs/dvfs.hpp"

namespace {

dvfs::Config load_config(const std::string& path) {
    if (!path.empty()) return dvfs::Config::load(path);
    if (std::filesystem::exists("dvfs.conf")) return dvfs::Config::load("dvfs.conf");
    throw dvfs::ConfigError("no config found; run `dvfs setup` first or pass --config");
}

void print_report(const dvfs::VerifyReport& rep) {
    std::cout << "verdict: " << rep.verdict << "\n"
              << "failure: " << dvfs::to_string(rep.failure_kind) << "\n";
    if (!rep.offending_item.empty())
        std::cout << "offending: " << rep.offending_item << "\n";
    std::cout << "digest recomputes: " << rep.digest_recomputes << "\n"
              << "structural checks: " << rep.structural_checks << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fuzzy verifiable encrypted search"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "config file (key=value lines)");

    auto* setup = app.add_subcommand("setup", "generate keys and write a config file");
    std::string setup_out = "dvfs.conf";
    int setup_height = 32;
    setup->add_option("--out", setup_out, "where to write the config");
    setup->add_option("--height", setup_height, "tree height L (2..32)");

    auto* ingest = app.add_subcommand("ingest", "index every file in a directory");
    std::string ingest_dir;
    ingest->add_option("dir", ingest_dir, "directory of plain-text files")->required();

    auto* addc = app.add_subcommand("add", "index a single file");
    std::string add_file;
    addc->add_option("file", add_file)->required();

    auto* delc = app.add_subcommand("del", "remove a keyword from a document");
    std::uint64_t del_doc = 0;
    std::string del_kw;
    delc->add_option("doc_id", del_doc)->required();
    delc->add_option("keyword", del_kw)->required();

    auto* searchc = app.add_subcommand("search", "conjunctive fuzzy keyword search");
    std::vector<std::string> query;
    bool show_proof = false;
    searchc->add_option("keywords", query)->required()->expected(-1);
    searchc->add_flag("--show-proof", show_proof, "print the auxiliary proof");

    auto* verifyc = app.add_subcommand("verify", "verify a stored search transcript");
    std::uint64_t verify_seq = 0;
    bool verify_latest = true;
    verifyc->add_option("--seq", verify_seq, "ledger sequence of the transcript")
        ->each([&](const std::string&) { verify_latest = false; });

    auto* repoc = app.add_subcommand("repo", "local repository inspection");
    auto* repo_show = repoc->add_subcommand("show", "show a keyword's version state");
    std::string repo_kw;
    repo_show->add_option("keyword", repo_kw)->required();

    auto* ledgerc = app.add_subcommand("ledger", "ledger inspection");
    auto* ledger_validate = ledgerc->add_subcommand("validate", "re-check the hash chain");
    auto* ledger_show = ledgerc->add_subcommand("show", "print one ledger record");
    std::uint64_t ledger_seq = 0;
    ledger_show->add_option("seq", ledger_seq)->required();

    auto* statsc = app.add_subcommand("index", "index inspection");
    auto* stats_show = statsc->add_subcommand("stats", "print index size counters");
    (void)stats_show;

    auto* benchc = app.add_subcommand("bench", "desk-scale experiments");
    auto* bench_acc = benchc->add_subcommand("accuracy", "bucket preservation per error type");
    std::size_t acc_samples = 100;
    std::uint64_t acc_seed = 7;
    bench_acc->add_option("--samples", acc_samples);
    bench_acc->add_option("--seed", acc_seed);
    auto* bench_scale = benchc->add_subcommand("scaling", "probe counts vs corpus size");
    std::vector<std::size_t> scale_ns = {125, 250, 500, 1000};
    bench_scale->add_option("--sizes", scale_ns);
    auto* bench_cal = benchc->add_subcommand("lsh-calibrate", "collision rates near/far");
    std::size_t cal_pairs = 10000;
    std::uint64_t cal_seed = 11;
    bench_cal->add_option("--pairs", cal_pairs);
    bench_cal->add_option("--seed", cal_seed);

    auto* advc = app.add_subcommand("adversary", "corrupt the store, then search+verify");
    std::string adv_mode;
    std::vector<std::string> adv_query;
    std::uint64_t adv_seed = 13;
    advc->add_option("mode", adv_mode, "tamper-doc | drop-result | stale-doc | none")
        ->required();
    advc->add_option("keywords", adv_query)->expected(-1);
    advc->add_option("--seed", adv_seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (setup->parsed()) {
            dvfs::Config cfg = dvfs::Config::defaults_with_fresh_keys();
            cfg.height = setup_height;
            cfg.validate();
            cfg.save(setup_out);
            std::cout << "wrote " << setup_out << " (L=" << cfg.height
                      << ", k=" << cfg.lsh_functions << ")\n";
            return 0;
        }

        dvfs::Config cfg = load_config(config_path);
        dvfs::Service svc(cfg);

        if (ingest->parsed()) {
            auto stats = svc.ingest(ingest_dir);
            svc.save();
            std::cout << "indexed " << stats.indexed << " documents, skipped "
                      << stats.skipped << "\n";
        } else if (addc->parsed()) {
            std::ifstream in(add_file);
            if (!in) throw dvfs::StoreError("cannot read " + add_file);
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            std::uint64_t id = svc.next_doc_id();
            auto kws = svc.add_document(id, text);
            svc.save();
            std::cout << "doc " << id << " indexed with " << kws.size()
                      << " keywords\n";
        } else if (delc->parsed()) {
            svc.remove_keyword(del_doc, del_kw);
            svc.save();
            std::cout << "deleted keyword from doc " << del_doc << "\n";
        } else if (searchc->parsed()) {
            auto resp = svc.run_search(query);
            svc.save();
            std::cout << "results:";
            for (auto d : resp.transcript.results) std::cout << " " << d;
            std::cout << "\nprobes: " << resp.transcript.probe_count
                      << "\ntranscript ledger seq: " << resp.ledger_seq << "\n";
            if (show_proof) {
                for (const auto& e : resp.transcript.main.ap)
                    std::cout << "AP M " << (e.path.empty() ? "-" : e.path) << " "
                              << e.bit << "\n";
                for (const auto& e : resp.transcript.shadow.ap)
                    std::cout << "AP B " << (e.path.empty() ? "-" : e.path) << " "
                              << e.bit << "\n";
            }
        } else if (verifyc->parsed()) {
            const auto& recs = svc.ledger().records();
            const dvfs::LedgerRecord* target = nullptr;
            if (verify_latest) {
                for (auto it = recs.rbegin(); it != recs.rend(); ++it)
                    if (it->kind == dvfs::RecordKind::SearchTranscript) {
                        target = &*it;
                        break;
                    }
            } else {
                target = &svc.ledger().at(verify_seq);
            }
            if (!target || target->kind != dvfs::RecordKind::SearchTranscript)
                throw dvfs::LedgerError("no search transcript at that position");
            dvfs::SearchResponse resp;
            resp.transcript = dvfs::parse_transcript(target->payload);
            for (auto d : resp.transcript.results)
                resp.ciphertexts.push_back(svc.store().get(d));
            print_report(svc.run_verify(resp));
        } else if (repo_show->parsed()) {
            dvfs::BucketString s = dvfs::fuzzify(svc.lsh(), repo_kw);
            std::cout << "bucket: " << s.text << "\n";
            if (const auto* e = svc.repo().find(s)) {
                std::cout << "version: " << e->version << "\nqueried: " << e->queried
                          << "\nlast_added: "
                          << (e->last_added ? std::to_string(*e->last_added) : "-")
                          << "\nlast_deleted: "
                          << (e->last_deleted ? std::to_string(*e->last_deleted) : "-")
                          << "\n";
            } else {
                std::cout << "(keyword not in local repository)\n";
            }
        } else if (ledger_validate->parsed()) {
            svc.ledger().validate();
            std::cout << "ledger OK: " << svc.ledger().size() << " records\n";
        } else if (ledger_show->parsed()) {
            const auto& rec = svc.ledger().at(ledger_seq);
            std::cout << rec.seq << " " << dvfs::to_string(rec.kind) << "\n"
                      << rec.payload << "\n";
        } else if (stats_show->parsed()) {
            std::cout << "documents: " << svc.index().digest_count() << "\n"
                      << "entries: " << svc.index().entry_count() << "\n"
                      << "height: " << svc.index().height() << "\n"
                      << "repo keywords: " << svc.repo().size() << "\n"
                      << "ledger records: " << svc.ledger().size() << "\n";
        } else if (bench_acc->parsed()) {
            dvfs::CorpusGen gen(acc_seed, std::max<std::size_t>(acc_samples, 600));
            auto rows =
                dvfs::bench_accuracy(svc.lsh(), gen.dictionary(), acc_samples, acc_seed);
            for (const auto& r : rows)
                std::cout << dvfs::to_string(r.type) << " " << std::fixed
                          << std::setprecision(1) << r.rate() << "% (" << r.preserved
                          << "/" << r.samples << ")\n";
        } else if (bench_scale->parsed()) {
            std::cout << "n ap_length probes |R| verify_recomputes verify_checks ms\n";
            for (std::size_t n : scale_ns) {
                int h = 1;
                while ((std::size_t(1) << (h - 1)) < n) ++h;
                auto pt = dvfs::scaling_point(
                    "bench_scaling/n" + std::to_string(n), n, h, 21);
                std::cout << pt.n << " " << pt.ap_length << " " << pt.probes << " "
                          << pt.result_size << " " << pt.verify_recomputes << " "
                          << pt.verify_checks << " " << std::fixed
                          << std::setprecision(2) << pt.search_ms << "\n";
            }
        } else if (bench_cal->parsed()) {
            auto res = dvfs::lsh_calibrate(svc.lsh(), cal_pairs, cal_seed);
            std::cout << std::fixed << std::setprecision(4)
                      << "near collision rate: " << res.near_collision << "\n"
                      << "far collision rate:  " << res.far_collision << "\n";
        } else if (advc->parsed()) {
            if (adv_query.empty())
                throw dvfs::ConfigError("adversary needs query keywords");
            auto rep = dvfs::run_adversary(svc, adv_query,
                                           dvfs::adversary_mode_from(adv_mode), adv_seed);
            print_report(rep);
            svc.save();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
