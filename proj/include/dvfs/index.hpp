#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "dvfs/bytes.hpp"
#include "dvfs/crypto.hpp"

namespace dvfs {

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Binary string addressing a node in the virtual tree. Root is "",
/// children append '0' (left) and '1' (right); leaves have length L-1.
using PathCode = std::string;

enum class TreeTag : std::uint8_t { Main = 'M', Delete = 'B' };

using IndexKey = H1Digest;

struct IndexKeyHash {
    std::size_t operator()(const IndexKey& k) const {
        std::size_t h = 0;
        for (int i = 0; i < 8; ++i) h = (h << 8) | k[std::size_t(i)];
        return h;
    }
};

/// Zero-padded big-endian binary form of the doc id, length L-1.
inline PathCode path_of(std::uint64_t doc_id, int height) {
    int bits = height - 1;
    if (bits < 0 || (bits < 64 && doc_id >= (std::uint64_t(1) << bits)))
        throw CapacityError("doc_id exceeds tree capacity");
    PathCode p(std::size_t(bits), '0');
    for (int i = bits - 1; i >= 0 && doc_id; --i, doc_id >>= 1)
        if (doc_id & 1) p[std::size_t(i)] = '1';
    return p;
}

inline std::uint64_t doc_id_of(const PathCode& leaf) {
    std::uint64_t v = 0;
    for (char c : leaf) v = (v << 1) | std::uint64_t(c == '1');
    return v;
}

/// All prefixes of the leaf path, root first, leaf last (L entries).
inline std::vector<PathCode> nodes_on_path(const PathCode& leaf, int height) {
    if (int(leaf.size()) != height - 1)
        throw ContractViolation("nodes_on_path: not a leaf path");
    std::vector<PathCode> nodes;
    nodes.reserve(std::size_t(height));
    for (int len = 0; len <= int(leaf.size()); ++len)
        nodes.emplace_back(leaf.substr(0, std::size_t(len)));
    return nodes;
}

/// The flat key/value store behind the logical tree: membership keys for
/// the main tree and the deletion shadow tree, plus per-leaf digests.
class EncryptedIndex {
  public:
    explicit EncryptedIndex(int height = 32) : height_(height) {
        if (height < 1 || height > 32)
            throw ContractViolation("EncryptedIndex: height out of range");
    }

    int height() const { return height_; }
    std::uint64_t entry_count() const { return entry_count_; }
    std::size_t digest_count() const { return digests_.size(); }

    // Hash evaluations for index keys and membership probes, for the
    // complexity assertions.
    std::uint64_t hash_evals() const { return hash_evals_; }
    std::uint64_t probes() const { return probes_; }
    void reset_counters() const { hash_evals_ = 0; probes_ = 0; }

    /// H_1(tag || path || 0x1F || token). Counted as one key-hash evaluation.
    IndexKey make_key(TreeTag tag, const PathCode& path, const PrfOutput& token) const {
        Bytes input;
        input.reserve(1 + path.size() + 1 + token.size());
        input.push_back(static_cast<std::uint8_t>(tag));
        append(input, path);
        input.push_back(kSep);
        append(input, token);
        ++hash_evals_;
        return hash_h1(input);
    }

    void insert_key(TreeTag tag, const IndexKey& key) {
        auto& set = tag == TreeTag::Main ? entries_ : delete_entries_;
        if (set.insert(key).second) ++entry_count_;
    }

    void insert_value(TreeTag tag, const PathCode& path, const PrfOutput& token) {
        insert_key(tag, make_key(tag, path, token));
    }

    bool contains(TreeTag tag, const PathCode& path, const PrfOutput& token) const {
        ++probes_;
        const auto& set = tag == TreeTag::Main ? entries_ : delete_entries_;
        return set.count(make_key(tag, path, token)) != 0;
    }

    bool contains_key(TreeTag tag, const IndexKey& key) const {
        ++probes_;
        const auto& set = tag == TreeTag::Main ? entries_ : delete_entries_;
        return set.count(key) != 0;
    }

    void store_digest(const PathCode& leaf_path, const PrfOutput& digest) {
        digests_[leaf_path] = digest;
    }

    std::optional<PrfOutput> digest(const PathCode& leaf_path) const {
        auto it = digests_.find(leaf_path);
        if (it == digests_.end()) return std::nullopt;
        return it->second;
    }

    bool has_doc(std::uint64_t doc_id) const {
        return digests_.count(path_of(doc_id, height_)) != 0;
    }

    /// IndexGen insertion: one entry per (token, path node) plus the leaf
    /// digest. The digest binds the leaf path to the ciphertext body.
    void insert_doc(std::uint64_t doc_id, const std::vector<PrfOutput>& tokens,
                    const Ciphertext& ct, const MasterKey& key) {
        if (tokens.empty()) throw ContractViolation("insert_doc: empty token list");
        PathCode leaf = path_of(doc_id, height_);
        if (digests_.count(leaf)) throw ContractViolation("insert_doc: duplicate doc_id");
        auto nodes = nodes_on_path(leaf, height_);
        for (const auto& tok : tokens)
            for (const auto& node : nodes) insert_value(TreeTag::Main, node, tok);
        store_digest(leaf, leaf_digest(key, leaf, ct));
    }

    static PrfOutput leaf_digest(const MasterKey& key, const PathCode& leaf,
                                 const Ciphertext& ct) {
        Bytes input;
        input.reserve(leaf.size() + 1 + ct.body.size());
        append(input, leaf);
        input.push_back(kSep);
        append(input, ct.body.data(), ct.body.size());
        return prf(key, "dig", input);
    }

    void persist(const std::string& file_path) const {
        std::ofstream out(file_path, std::ios::trunc);
        if (!out) throw FormatError("cannot open index file for writing: " + file_path);
        out << "DVFS-INDEX 1 L=" << height_ << " M=" << entry_count_ << "\n";
        for (const auto& k : entries_) out << "E " << to_hex(k) << "\n";
        for (const auto& k : delete_entries_) out << "B " << to_hex(k) << "\n";
        for (const auto& [path, d] : digests_)
            out << "D " << (path.empty() ? "-" : path) << " " << to_hex(d) << "\n";
        out.flush();
        if (!out) throw FormatError("write failed: " + file_path);
    }

    static EncryptedIndex load(const std::string& file_path) {
        std::ifstream in(file_path);
        if (!in) throw FormatError("cannot open index file: " + file_path);
        std::string line;
        if (!std::getline(in, line)) throw FormatError("index file empty (line 1)");
        std::istringstream header(line);
        std::string magic, version, lfield, mfield;
        header >> magic >> version >> lfield >> mfield;
        if (magic != "DVFS-INDEX" || version != "1" || lfield.rfind("L=", 0) != 0 ||
            mfield.rfind("M=", 0) != 0)
            throw FormatError("bad index header (line 1)");
        EncryptedIndex idx(std::stoi(lfield.substr(2)));
        std::uint64_t expected_m = std::stoull(mfield.substr(2));
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            std::istringstream rec(line);
            std::string kind, a, b;
            rec >> kind >> a;
            try {
                if (kind == "E") {
                    idx.entries_.insert(array_from_hex<64>(a));
                } else if (kind == "B") {
                    idx.delete_entries_.insert(array_from_hex<64>(a));
                } else if (kind == "D") {
                    rec >> b;
                    PathCode path = (a == "-") ? PathCode{} : a;
                    idx.digests_[path] = array_from_hex<32>(b);
                } else {
                    throw FormatError("unknown record kind");
                }
            } catch (const FormatError&) {
                throw FormatError("malformed index record (line " +
                                  std::to_string(lineno) + ")");
            }
        }
        idx.entry_count_ = idx.entries_.size() + idx.delete_entries_.size();
        if (idx.entry_count_ != expected_m)
            throw FormatError("index entry count mismatch (header M=" +
                              std::to_string(expected_m) + ", counted " +
                              std::to_string(idx.entry_count_) + ")");
        return idx;
    }

    const std::map<PathCode, PrfOutput>& digests() const { return digests_; }

  private:
    int height_;
    std::unordered_set<IndexKey, IndexKeyHash> entries_;
    std::unordered_set<IndexKey, IndexKeyHash> delete_entries_;
    std::map<PathCode, PrfOutput> digests_;
    std::uint64_t entry_count_ = 0;
    mutable std::uint64_t hash_evals_ = 0;
    mutable std::uint64_t probes_ = 0;
};

}  // namespace dvfs
