#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dvfs/config.hpp"
#include "dvfs/index.hpp"
#include "dvfs/ledger.hpp"
#include "dvfs/search.hpp"
#include "dvfs/store.hpp"
#include "dvfs/text.hpp"
#include "dvfs/verify.hpp"
#include "dvfs/version.hpp"

namespace dvfs {

struct IngestStats {
    std::size_t indexed = 0;
    std::size_t skipped = 0;
};

struct SearchResponse {
    std::uint64_t ledger_seq = 0;
    SearchTranscript transcript;
    std::vector<Ciphertext> ciphertexts;
};

/// Wires the pieces together: client-side state (keys, local repo), the
/// ledger-held state (chain repo, index appends, transcripts) and the
/// document store. The chain repo is never persisted separately; it is
/// rebuilt from ledger records on open, which keeps criterion "replay from
/// the ledger" honest by construction.
class Service {
  public:
    explicit Service(Config cfg)
        : cfg_(std::move(cfg)),
          key_(cfg_.master_key()),
          fam_(cfg_.lsh_family()),
          index_(cfg_.height),
          ledger_(Ledger::open(cfg_.ledger_path)),
          store_(cfg_.store_dir) {
        if (std::filesystem::exists(cfg_.index_path))
            index_ = EncryptedIndex::load(cfg_.index_path);
        if (std::filesystem::exists(cfg_.repo_path))
            repo_ = LocalRepo::load(cfg_.repo_path);
        for (const auto& rec : ledger_.records())
            if (rec.kind == RecordKind::ChainAppend)
                chain_.append(parse_chain_payload(rec.payload));
    }

    const Config& config() const { return cfg_; }
    const MasterKey& master_key() const { return key_; }
    const LshFamily& lsh() const { return fam_; }
    EncryptedIndex& index() { return index_; }
    LocalRepo& repo() { return repo_; }
    ChainRepo& chain() { return chain_; }
    Ledger& ledger() { return ledger_; }
    DocumentStore& store() { return store_; }

    void save() {
        index_.persist(cfg_.index_path);
        repo_.persist(cfg_.repo_path);
    }

    std::uint64_t next_doc_id() const {
        std::uint64_t next = 0;
        for (const auto& [leaf, dig] : index_.digests())
            next = std::max(next, doc_id_of(leaf) + 1);
        return next;
    }

    /// Index one document body under the given id. Keywords are extracted,
    /// fuzzified and added one by one; every index mutation is logged.
    std::vector<std::string> add_document(std::uint64_t doc_id, const std::string& text) {
        auto keywords = extract_keywords(text);
        if (keywords.empty())
            throw ContractViolation("document has no indexable keywords");
        if (index_.has_doc(doc_id))
            throw ContractViolation("doc_id already indexed: " + std::to_string(doc_id));

        Ciphertext ct = encrypt_doc(key_, doc_id, bytes_of(text));
        std::ostringstream payload;
        for (const auto& kw : keywords) {
            BucketString s = fuzzify(fam_, kw);
            UpdateToken up = add_keyword(repo_, chain_, index_, key_, s, doc_id);
            if (up.chain_record)
                ledger_.append(RecordKind::ChainAppend,
                               format_chain_payload(*up.chain_record));
            for (const auto& k : up.add_entries) payload << "E " << to_hex(k) << "\n";
            journal(doc_id, kw, s);
        }
        PathCode leaf = path_of(doc_id, index_.height());
        PrfOutput dig = EncryptedIndex::leaf_digest(key_, leaf, ct);
        index_.store_digest(leaf, dig);
        payload << "D " << (leaf.empty() ? "-" : leaf) << " " << to_hex(dig) << "\n";
        ledger_.append(RecordKind::IndexAppend, payload.str());
        store_.put(ct);
        return keywords;
    }

    IngestStats ingest(const std::string& dir) {
        IngestStats stats;
        std::vector<std::filesystem::path> files;
        for (const auto& ent : std::filesystem::directory_iterator(dir))
            if (ent.is_regular_file()) files.push_back(ent.path());
        std::sort(files.begin(), files.end());
        std::uint64_t doc_id = next_doc_id();
        for (const auto& f : files) {
            std::ifstream in(f);
            if (!in) {
                std::cerr << "warning: cannot read " << f << ", skipping\n";
                ++stats.skipped;
                continue;
            }
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            try {
                add_document(doc_id, text);
            } catch (const ContractViolation& e) {
                std::cerr << "warning: " << f << ": " << e.what() << ", skipping\n";
                ++stats.skipped;
                continue;
            }
            ++doc_id;
            ++stats.indexed;
        }
        return stats;
    }

    /// Remove one (already fuzzified-on-the-fly) keyword from a document.
    void remove_keyword(std::uint64_t doc_id, const std::string& raw_keyword) {
        BucketString s = fuzzify(fam_, raw_keyword);
        auto keys = delete_keyword(repo_, index_, key_, s, doc_id);
        std::ostringstream payload;
        for (const auto& k : keys) payload << "B " << to_hex(k) << "\n";
        ledger_.append(RecordKind::IndexAppend, payload.str());
    }

    SearchResponse run_search(const std::vector<std::string>& query) {
        Trapdoor tk = trapgen(repo_, key_, fam_, query);
        SearchResponse resp;
        resp.transcript = search(index_, chain_, tk);
        resp.ledger_seq =
            ledger_.append(RecordKind::SearchTranscript, serialize(resp.transcript));
        for (std::uint64_t d : resp.transcript.results)
            resp.ciphertexts.push_back(store_.get(d));
        return resp;
    }

    VerifyReport run_verify(const SearchResponse& resp) {
        VerifyReport rep =
            verify(key_, VerifyInput{resp.transcript, resp.ciphertexts}, index_.height());
        std::ostringstream payload;
        payload << "verdict=" << rep.verdict << " kind=" << to_string(rep.failure_kind)
                << " item=" << (rep.offending_item.empty() ? "-" : rep.offending_item)
                << " recomputes=" << rep.digest_recomputes
                << " checks=" << rep.structural_checks;
        ledger_.append(RecordKind::VerifyReport, payload.str());
        return rep;
    }

    static std::string format_chain_payload(const ChainRecord& rec) {
        return to_hex(rec.lookup_key) + " " + to_hex(rec.payload);
    }

    static ChainRecord parse_chain_payload(const std::string& payload) {
        std::istringstream in(payload);
        std::string a, b;
        in >> a >> b;
        if (in.fail()) throw LedgerError("malformed chain payload");
        return ChainRecord{array_from_hex<32>(a), array_from_hex<32>(b)};
    }

  private:
    void journal(std::uint64_t doc_id, const std::string& kw, const BucketString& s) {
        if (!cfg_.debug_journal) return;
        if (!journal_.is_open()) {
            journal_.open(cfg_.journal_path, std::ios::app);
            if (!journal_)
                throw FormatError("cannot open journal: " + cfg_.journal_path);
        }
        journal_ << doc_id << " " << kw << " " << s.text << "\n";
        journal_.flush();
    }

    Config cfg_;
    MasterKey key_;
    LshFamily fam_;
    EncryptedIndex index_;
    LocalRepo repo_;
    ChainRepo chain_;
    Ledger ledger_;
    DocumentStore store_;
    std::ofstream journal_;
};

/// Rebuild server-side state purely from ledger records. Used by the replay
/// check: membership answers must match the live index.
struct ReplayedState {
    EncryptedIndex index;
    ChainRepo chain;
};

inline ReplayedState replay_from_ledger(const Ledger& ledger, int height) {
    ReplayedState st{EncryptedIndex(height), ChainRepo{}};
    for (const auto& rec : ledger.records()) {
        if (rec.kind == RecordKind::ChainAppend) {
            st.chain.append(Service::parse_chain_payload(rec.payload));
        } else if (rec.kind == RecordKind::IndexAppend) {
            std::istringstream in(rec.payload);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                std::istringstream l(line);
                std::string kind, a, b;
                l >> kind >> a;
                if (kind == "E")
                    st.index.insert_key(TreeTag::Main, array_from_hex<64>(a));
                else if (kind == "B")
                    st.index.insert_key(TreeTag::Delete, array_from_hex<64>(a));
                else if (kind == "D") {
                    l >> b;
                    st.index.store_digest(a == "-" ? PathCode{} : a,
                                          array_from_hex<32>(b));
                } else {
                    throw LedgerError("unknown index payload record: " + kind);
                }
            }
        }
    }
    return st;
}

}  // namespace dvfs
