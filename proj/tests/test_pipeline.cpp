#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "dvfs/dvfs.hpp"

using namespace dvfs;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() /
              ("dvfs_pipe_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

Config test_config(const TempDir& tmp, int height = 6) {
    Config cfg = Config::defaults_with_fresh_keys();
    cfg.height = height;
    cfg.index_path = tmp.path("dvfs.index");
    cfg.ledger_path = tmp.path("dvfs.ledger");
    cfg.repo_path = tmp.path("dvfs.repo");
    cfg.store_dir = tmp.path("docs");
    cfg.journal_path = tmp.path("dvfs.journal");
    cfg.debug_journal = true;
    cfg.validate();
    return cfg;
}

}  // namespace

TEST_CASE("config files round-trip and env vars override") {
    TempDir tmp;
    Config cfg = test_config(tmp);
    cfg.save(tmp.path("dvfs.conf"));
    Config back = Config::load(tmp.path("dvfs.conf"));
    CHECK(back.master_key_hex == cfg.master_key_hex);
    CHECK(back.lsh_seed_hex == cfg.lsh_seed_hex);
    CHECK(back.height == cfg.height);
    CHECK(back.store_dir == cfg.store_dir);

    setenv("DVFS_HEIGHT", "12", 1);
    Config overridden = Config::load(tmp.path("dvfs.conf"));
    unsetenv("DVFS_HEIGHT");
    CHECK(overridden.height == 12);

    CHECK_THROWS_AS(Config::load(tmp.path("missing.conf")), ConfigError);
    Config bad = cfg;
    bad.height = 99;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("keyword extraction filters stopwords and stems") {
    auto kws = extract_keywords("The servers WERE encrypting, and the server encrypts!");
    // "servers"/"server" and "encrypting"/"encrypts" collapse; stopwords drop.
    CHECK(kws == std::vector<std::string>{"server", "encrypt"});
    CHECK(extract_keywords("a an the of").empty());
}

TEST_CASE("ingest indexes every readable file and search finds them") {
    TempDir tmp;
    fs::path corpus = tmp.dir / "corpus";
    fs::create_directories(corpus);
    std::ofstream(corpus / "a.txt") << "zebra quantum ledger";
    std::ofstream(corpus / "b.txt") << "zebra walrus";
    std::ofstream(corpus / "c.txt") << "quantum walrus ledger";

    Service svc(test_config(tmp));
    IngestStats st = svc.ingest(corpus.string());
    CHECK(st.indexed == 3);
    CHECK(st.skipped == 0);

    // Files are ingested in sorted order: a=0, b=1, c=2.
    CHECK(svc.run_search({"zebra"}).transcript.results ==
          std::set<std::uint64_t>{0, 1});
    CHECK(svc.run_search({"zebra", "quantum"}).transcript.results ==
          std::set<std::uint64_t>{0});
    CHECK(svc.run_search({"ledger", "quantum"}).transcript.results ==
          std::set<std::uint64_t>{0, 2});

    // Returned ciphertexts decrypt to the original texts.
    SearchResponse resp = svc.run_search({"walrus"});
    REQUIRE(resp.ciphertexts.size() == 2);
    for (const auto& ct : resp.ciphertexts) {
        Bytes pt = decrypt_doc(svc.master_key(), ct);
        std::string text(pt.begin(), pt.end());
        CHECK(text.find("walrus") != std::string::npos);
    }
}

TEST_CASE("empty ingest directory yields an empty index") {
    TempDir tmp;
    fs::path corpus = tmp.dir / "corpus";
    fs::create_directories(corpus);
    Service svc(test_config(tmp));
    IngestStats st = svc.ingest(corpus.string());
    CHECK(st.indexed == 0);
    CHECK(svc.index().entry_count() == 0);
}

TEST_CASE("end-to-end delete, verify and journal") {
    TempDir tmp;
    Config cfg = test_config(tmp);
    Service svc(cfg);
    svc.add_document(0, "apple banana cherry");
    svc.add_document(1, "apple cherry");
    svc.add_document(2, "banana date");

    SearchResponse resp = svc.run_search({"apple"});
    CHECK(resp.transcript.results == std::set<std::uint64_t>{0, 1});
    VerifyReport rep = svc.run_verify(resp);
    CHECK(rep.verdict == 1);

    svc.remove_keyword(0, "apple");
    SearchResponse after = svc.run_search({"apple"});
    CHECK(after.transcript.results == std::set<std::uint64_t>{1});
    CHECK(svc.run_verify(after).verdict == 1);

    // The journal records (doc, stem, bucket) for every indexed keyword.
    std::ifstream journal(cfg.journal_path);
    REQUIRE(journal.good());
    std::size_t lines = 0;
    std::string line;
    while (std::getline(journal, line)) ++lines;
    CHECK(lines == 7);
}

TEST_CASE("state survives persistence across service instances") {
    TempDir tmp;
    Config cfg = test_config(tmp);
    {
        Service svc(cfg);
        svc.add_document(0, "falcon gamma");
        svc.run_search({"falcon"});  // bump pending
        svc.add_document(1, "falcon delta");
        svc.save();
    }
    Service svc(cfg);
    SearchResponse resp = svc.run_search({"falcon"});
    CHECK(resp.transcript.results == std::set<std::uint64_t>{0, 1});
    CHECK(svc.run_verify(resp).verdict == 1);
}

TEST_CASE("ledger replay reproduces live membership") {
    TempDir tmp;
    Config cfg = test_config(tmp, 8);
    Service svc(cfg);
    CorpusGen gen(91, 120);
    for (std::uint64_t d = 0; d < 30; ++d) svc.add_document(d, gen.document(5, 12));
    svc.run_search({gen.dictionary()[0]});
    svc.add_document(30, gen.dictionary()[0] + " " + gen.dictionary()[1]);
    svc.remove_keyword(3, gen.dictionary()[0]);

    ReplayedState replayed = replay_from_ledger(svc.ledger(), cfg.height);
    CHECK(replayed.index.entry_count() == svc.index().entry_count());
    CHECK(replayed.chain.size() == svc.chain().size());

    std::mt19937_64 rng(7);
    LshFamily fam = svc.lsh();
    for (int probe = 0; probe < 10000; ++probe) {
        BucketString s = fuzzify(fam, gen.dictionary()[rng() % 120]);
        PrfOutput tok = versioned_token(svc.master_key(), s, rng() % 3);
        PathCode node = path_of(rng() % 128, 8).substr(0, rng() % 8);
        TreeTag tag = (rng() % 2) ? TreeTag::Main : TreeTag::Delete;
        CHECK(replayed.index.contains(tag, node, tok) ==
              svc.index().contains(tag, node, tok));
    }
    for (const auto& [leaf, dig] : svc.index().digests())
        CHECK(replayed.index.digest(leaf) == dig);
}

TEST_CASE("adversary modes produce the expected failure kinds") {
    TempDir tmp;
    Service svc(test_config(tmp));
    svc.add_document(0, "walrus quantum");
    svc.add_document(1, "walrus ledger");

    CHECK(run_adversary(svc, {"walrus"}, AdversaryMode::None, 1).verdict == 1);

    VerifyReport tampered = run_adversary(svc, {"walrus"}, AdversaryMode::TamperDoc, 2);
    CHECK(tampered.verdict == 0);
    CHECK(tampered.failure_kind == FailureKind::DigestMismatch);

    // Un-tamper by re-instating a fresh service world for the next modes.
    TempDir tmp2;
    Service svc2(test_config(tmp2));
    svc2.add_document(0, "walrus quantum");
    svc2.add_document(1, "walrus ledger");

    VerifyReport dropped = run_adversary(svc2, {"walrus"}, AdversaryMode::DropResult, 3);
    CHECK(dropped.verdict == 0);
    CHECK(dropped.failure_kind == FailureKind::ResultSetMismatch);

    VerifyReport stale = run_adversary(svc2, {"quantum"}, AdversaryMode::StaleDoc, 4);
    CHECK(stale.verdict == 0);
    CHECK(stale.failure_kind == FailureKind::DigestMismatch);
}

TEST_CASE("documents with no indexable keywords are rejected") {
    TempDir tmp;
    Service svc(test_config(tmp));
    CHECK_THROWS_AS(svc.add_document(0, "of the and a"), ContractViolation);
}
