#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dvfs/bytes.hpp"
#include "dvfs/crypto.hpp"
#include "dvfs/fuzzy.hpp"
#include "dvfs/index.hpp"

namespace dvfs {

/// Client-side per-keyword version state.
struct LocalRepoEntry {
    bool queried = false;              // b: queried since last bump
    std::uint32_t version = 0;         // v
    std::optional<std::uint64_t> last_added;    // n_add
    std::optional<std::uint64_t> last_deleted;  // n_del, cleared on bump
};

class LocalRepo {
  public:
    LocalRepoEntry& get_or_create(const BucketString& s) { return entries_[s.text]; }

    const LocalRepoEntry* find(const BucketString& s) const {
        auto it = entries_.find(s.text);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return entries_.size(); }

    void persist(const std::string& file_path) const {
        std::ofstream out(file_path, std::ios::trunc);
        if (!out) throw FormatError("cannot open repo file for writing: " + file_path);
        for (const auto& [bucket, e] : entries_) {
            out << "LR " << bucket << " " << (e.queried ? 1 : 0) << " " << e.version
                << " " << (e.last_added ? std::to_string(*e.last_added) : "-") << " "
                << (e.last_deleted ? std::to_string(*e.last_deleted) : "-") << "\n";
        }
    }

    static LocalRepo load(const std::string& file_path) {
        std::ifstream in(file_path);
        if (!in) throw FormatError("cannot open repo file: " + file_path);
        LocalRepo repo;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            std::istringstream rec(line);
            std::string tag, bucket, nadd, ndel;
            int queried = 0;
            std::uint32_t version = 0;
            rec >> tag >> bucket >> queried >> version >> nadd >> ndel;
            if (tag != "LR" || rec.fail())
                throw FormatError("malformed repo record (line " +
                                  std::to_string(lineno) + ")");
            LocalRepoEntry e;
            e.queried = queried != 0;
            e.version = version;
            if (nadd != "-") e.last_added = std::stoull(nadd);
            if (ndel != "-") e.last_deleted = std::stoull(ndel);
            repo.entries_[bucket] = e;
        }
        return repo;
    }

    const std::map<std::string, LocalRepoEntry>& entries() const { return entries_; }

  private:
    std::map<std::string, LocalRepoEntry> entries_;
};

/// One hop of the XOR chain: looking up H_2(token_v) yields
/// H_3(token_v) XOR token_{v-1}.
struct ChainRecord {
    PrfOutput lookup_key{};
    PrfOutput payload{};
};

/// Ledger-side repository of chained historical trapdoors (BR).
class ChainRepo {
  public:
    void append(const ChainRecord& rec) { records_[rec.lookup_key] = rec.payload; }

    std::optional<PrfOutput> find(const PrfOutput& lookup_key) const {
        auto it = records_.find(lookup_key);
        if (it == records_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const { return records_.size(); }

    // Test hook: corrupting a stored payload must truncate resolution.
    void corrupt_payload(const PrfOutput& lookup_key, std::size_t byte_index) {
        auto it = records_.find(lookup_key);
        if (it != records_.end()) it->second[byte_index] ^= 0xFF;
    }

    const std::map<PrfOutput, PrfOutput>& records() const { return records_; }

  private:
    std::map<PrfOutput, PrfOutput> records_;
};

/// F_K("tok", bucket || 0x1F || decimal version). The version inside the
/// PRF input is what makes pre-bump tokens useless against post-bump entries.
inline PrfOutput versioned_token(const MasterKey& key, const BucketString& s,
                                 std::uint32_t version) {
    Bytes input;
    append(input, s.text);
    input.push_back(kSep);
    append(input, std::to_string(version));
    return prf(key, "tok", input);
}

struct UpdateToken {
    std::vector<IndexKey> add_entries;  // exactly L keys: real + nonce padding
    std::optional<ChainRecord> chain_record;
    std::size_t real_count = 0;
    std::size_t padded_count = 0;
    bool bumped = false;
};

inline std::size_t common_prefix_len(const PathCode& a, const PathCode& b) {
    std::size_t n = std::min(a.size(), b.size());
    std::size_t i = 0;
    while (i < n && a[i] == b[i]) ++i;
    return i;
}

/// Add keyword (by bucket string) to a document. Bumps the version when the
/// keyword was queried since the last bump, or when a deletion was recorded
/// since the last bump (a re-add at an already-shadowed version would stay
/// invisible otherwise). The emitted entry list always has exactly L keys.
inline UpdateToken add_keyword(LocalRepo& lr, ChainRepo& br, EncryptedIndex& index,
                               const MasterKey& key, const BucketString& s,
                               std::uint64_t doc_id) {
    const int L = index.height();
    PathCode leaf = path_of(doc_id, L);
    LocalRepoEntry& e = lr.get_or_create(s);

    UpdateToken up;
    bool bump = e.queried || e.last_deleted.has_value();
    if (bump) {
        std::uint32_t v_new = e.version + 1;
        PrfOutput tok_new = versioned_token(key, s, v_new);
        PrfOutput tok_old = versioned_token(key, s, e.version);
        ChainRecord rec{hash_h2(tok_new), xor_bytes(hash_h3(tok_new), tok_old)};
        br.append(rec);
        up.chain_record = rec;
        up.bumped = true;
        e.version = v_new;
        e.queried = false;
        e.last_deleted.reset();
        e.last_added.reset();  // previous doc's entries live under the old version
    }

    PrfOutput token = versioned_token(key, s, e.version);
    auto nodes = nodes_on_path(leaf, L);

    std::size_t skip = 0;
    if (e.last_added && *e.last_added != doc_id) {
        // Shared-prefix nodes already hold this version's token.
        PathCode prev = path_of(*e.last_added, L);
        skip = common_prefix_len(prev, leaf) + 1;  // +1 for the root
    }

    for (std::size_t i = skip; i < nodes.size(); ++i) {
        IndexKey k = index.make_key(TreeTag::Main, nodes[i], token);
        index.insert_key(TreeTag::Main, k);
        up.add_entries.push_back(k);
    }
    up.real_count = up.add_entries.size();

    // Nonce padding keeps |T_up1| = L regardless of elision.
    while (up.add_entries.size() < std::size_t(L)) {
        Bytes nonce = random_bytes(64);
        IndexKey k{};
        std::copy(nonce.begin(), nonce.end(), k.begin());
        index.insert_key(TreeTag::Main, k);
        up.add_entries.push_back(k);
        ++up.padded_count;
    }

    e.last_added = doc_id;
    return up;
}

/// Remove keyword from a document: shadow-tree entries are inserted for every
/// historical version so that every token the search can probe is covered.
/// Returns the inserted keys so callers can log them.
inline std::vector<IndexKey> delete_keyword(LocalRepo& lr, EncryptedIndex& index,
                                            const MasterKey& key, const BucketString& s,
                                            std::uint64_t doc_id) {
    const int L = index.height();
    PathCode leaf = path_of(doc_id, L);
    LocalRepoEntry& e = lr.get_or_create(s);
    auto nodes = nodes_on_path(leaf, L);
    std::vector<IndexKey> inserted;
    for (std::uint32_t v = 0; v <= e.version; ++v) {
        PrfOutput token = versioned_token(key, s, v);
        for (const auto& node : nodes) {
            IndexKey k = index.make_key(TreeTag::Delete, node, token);
            index.insert_key(TreeTag::Delete, k);
            inserted.push_back(k);
        }
    }
    e.last_deleted = doc_id;
    return inserted;
}

/// Walk the XOR chain backwards from the current token. Returns tokens
/// newest to oldest; position i holds version (count-1-i).
inline std::vector<PrfOutput> resolve_history(const ChainRepo& br,
                                              const PrfOutput& current_token) {
    std::vector<PrfOutput> history{current_token};
    PrfOutput cur = current_token;
    while (true) {
        auto payload = br.find(hash_h2(cur));
        if (!payload) break;
        cur = xor_bytes(*payload, hash_h3(cur));
        history.push_back(cur);
    }
    return history;
}

}  // namespace dvfs
