#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "dvfs/bytes.hpp"
#include "dvfs/crypto.hpp"

namespace dvfs {

struct StoreError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The simulated cloud server: one file per ciphertext. This is the only
/// component the adversarial harness is allowed to corrupt.
class DocumentStore {
  public:
    DocumentStore() = default;
    explicit DocumentStore(std::string dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    void put(const Ciphertext& ct) {
        std::ofstream out(doc_path(ct.doc_id), std::ios::binary | std::ios::trunc);
        if (!out) throw StoreError("cannot write document " + std::to_string(ct.doc_id));
        out.write(reinterpret_cast<const char*>(ct.body.data()),
                  std::streamsize(ct.body.size()));
        out.flush();
        if (!out) throw StoreError("write failed for doc " + std::to_string(ct.doc_id));
    }

    Ciphertext get(std::uint64_t doc_id) const {
        std::ifstream in(doc_path(doc_id), std::ios::binary);
        if (!in) throw StoreError("no such document: " + std::to_string(doc_id));
        Ciphertext ct;
        ct.doc_id = doc_id;
        ct.body.assign(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
        return ct;
    }

    bool has(std::uint64_t doc_id) const {
        return std::filesystem::exists(doc_path(doc_id));
    }

    std::uintmax_t size_of(std::uint64_t doc_id) const {
        return std::filesystem::file_size(doc_path(doc_id));
    }

    // Adversarial hooks: corrupt or replace a stored ciphertext in place.
    void tamper(std::uint64_t doc_id, std::size_t byte_index) {
        Ciphertext ct = get(doc_id);
        if (ct.body.empty()) return;
        ct.body[byte_index % ct.body.size()] ^= 0x01;
        put(ct);
    }

    void replace(const Ciphertext& ct) { put(ct); }

    const std::string& dir() const { return dir_; }

  private:
    std::string doc_path(std::uint64_t doc_id) const {
        return dir_ + "/doc_" + std::to_string(doc_id) + ".bin";
    }

    std::string dir_;
};

}  // namespace dvfs
