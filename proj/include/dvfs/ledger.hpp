#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dvfs/bytes.hpp"
#include "dvfs/crypto.hpp"

namespace dvfs {

struct LedgerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RecordKind { IndexAppend, ChainAppend, SearchTranscript, VerifyReport };

inline const char* to_string(RecordKind k) {
    switch (k) {
        case RecordKind::IndexAppend: return "INDEX_APPEND";
        case RecordKind::ChainAppend: return "CHAIN_APPEND";
        case RecordKind::SearchTranscript: return "SEARCH_TRANSCRIPT";
        case RecordKind::VerifyReport: return "VERIFY_REPORT";
    }
    return "?";
}

inline RecordKind record_kind_from(const std::string& s) {
    if (s == "INDEX_APPEND") return RecordKind::IndexAppend;
    if (s == "CHAIN_APPEND") return RecordKind::ChainAppend;
    if (s == "SEARCH_TRANSCRIPT") return RecordKind::SearchTranscript;
    if (s == "VERIFY_REPORT") return RecordKind::VerifyReport;
    throw LedgerError("unknown record kind: " + s);
}

struct LedgerRecord {
    std::uint64_t seq = 0;
    RecordKind kind = RecordKind::IndexAppend;
    std::string payload;
    PrfOutput prev_hash{};
    PrfOutput this_hash{};
};

/// Append-only hash-chained log standing in for the blockchain. Records are
/// flushed before append() returns; any on-disk edit breaks the chain and is
/// rejected at open().
class Ledger {
  public:
    Ledger() = default;

    static Ledger open(const std::string& file_path) {
        Ledger led;
        led.path_ = file_path;
        std::ifstream in(file_path);
        if (in) {
            std::string line;
            std::uint64_t lineno = 0;
            while (std::getline(in, line)) {
                ++lineno;
                if (line.empty()) continue;
                led.records_.push_back(parse_record(line, lineno));
            }
            led.validate();
        }
        led.out_.open(file_path, std::ios::app);
        if (!led.out_) throw LedgerError("cannot open ledger file: " + file_path);
        return led;
    }

    std::uint64_t append(RecordKind kind, std::string payload) {
        LedgerRecord rec;
        rec.seq = records_.size();
        rec.kind = kind;
        rec.payload = std::move(payload);
        rec.prev_hash = records_.empty() ? PrfOutput{} : records_.back().this_hash;
        rec.this_hash = record_hash(rec);
        out_ << format_record(rec) << "\n";
        out_.flush();
        if (!out_) throw LedgerError("ledger write failed");
        records_.push_back(std::move(rec));
        return records_.back().seq;
    }

    const LedgerRecord& at(std::uint64_t seq) const {
        if (seq >= records_.size()) throw LedgerError("no such ledger record");
        return records_[seq];
    }

    std::size_t size() const { return records_.size(); }
    const std::vector<LedgerRecord>& records() const { return records_; }

    void validate() const {
        PrfOutput prev{};
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const auto& rec = records_[i];
            if (rec.seq != i)
                throw LedgerError("ledger sequence gap at " + std::to_string(i));
            if (rec.prev_hash != prev)
                throw LedgerError("ledger chain broken at seq " + std::to_string(i));
            if (record_hash(rec) != rec.this_hash)
                throw LedgerError("ledger record hash mismatch at seq " +
                                  std::to_string(i));
            prev = rec.this_hash;
        }
    }

    static PrfOutput record_hash(const LedgerRecord& rec) {
        Bytes input;
        dvfs::append(input, std::to_string(rec.seq));
        input.push_back(kSep);
        dvfs::append(input, std::string_view(to_string(rec.kind)));
        input.push_back(kSep);
        dvfs::append(input, rec.payload);
        input.push_back(kSep);
        dvfs::append(input, rec.prev_hash);
        PrfOutput out{};
        SHA256(input.data(), input.size(), out.data());
        return out;
    }

  private:
    static std::string format_record(const LedgerRecord& rec) {
        std::ostringstream out;
        out << rec.seq << " " << to_string(rec.kind) << " " << to_hex(rec.prev_hash)
            << " " << to_hex(rec.this_hash) << " " << base64_encode(rec.payload);
        return out.str();
    }

    static LedgerRecord parse_record(const std::string& line, std::uint64_t lineno) {
        std::istringstream in(line);
        LedgerRecord rec;
        std::string kind, prev_hex, this_hex, payload_b64;
        in >> rec.seq >> kind >> prev_hex >> this_hex >> payload_b64;
        if (in.fail())
            throw LedgerError("malformed ledger record (line " + std::to_string(lineno) +
                              ")");
        rec.kind = record_kind_from(kind);
        rec.prev_hash = array_from_hex<32>(prev_hex);
        rec.this_hash = array_from_hex<32>(this_hex);
        if (to_hex(rec.prev_hash) != prev_hex || to_hex(rec.this_hash) != this_hex)
            throw LedgerError("non-canonical hash encoding (line " +
                              std::to_string(lineno) + ")");
        rec.payload = base64_decode(payload_b64);
        // Reject non-canonical encodings, otherwise flips in the unused
        // trailing bits of the last base64 symbol would go unnoticed.
        if (base64_encode(rec.payload) != payload_b64)
            throw LedgerError("non-canonical payload encoding (line " +
                              std::to_string(lineno) + ")");
        return rec;
    }

    std::string path_;
    std::vector<LedgerRecord> records_;
    std::ofstream out_;
};

}  // namespace dvfs
