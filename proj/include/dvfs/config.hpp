#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "dvfs/bytes.hpp"
#include "dvfs/crypto.hpp"
#include "dvfs/fuzzy.hpp"

namespace dvfs {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Line-delimited key=value configuration. Environment variables prefixed
/// DVFS_ (e.g. DVFS_HEIGHT) override file values.
struct Config {
    std::string master_key_hex;
    std::string lsh_seed_hex;
    int lsh_functions = 8;      // k
    double lsh_window = LshFamily::kDefaultWindow;
    int height = 32;            // L
    std::string index_path = "dvfs.index";
    std::string ledger_path = "dvfs.ledger";
    std::string repo_path = "dvfs.repo";
    std::string store_dir = "dvfs.docs";
    std::string journal_path = "dvfs.journal";
    bool debug_journal = false;

    static Config defaults_with_fresh_keys() {
        Config cfg;
        cfg.master_key_hex = MasterKey::generate().hex();
        cfg.lsh_seed_hex = to_hex(random_bytes(32));
        return cfg;
    }

    MasterKey master_key() const {
        if (master_key_hex.size() != 64)
            throw ConfigError("master_key must be 64 hex chars");
        return MasterKey::from_hex(master_key_hex);
    }

    std::array<std::uint8_t, 32> lsh_seed() const {
        if (lsh_seed_hex.size() != 64) throw ConfigError("lsh_seed must be 64 hex chars");
        return array_from_hex<32>(lsh_seed_hex);
    }

    LshFamily lsh_family() const {
        return LshFamily::from_seed(lsh_seed(), lsh_functions, lsh_window);
    }

    void validate() const {
        (void)master_key();
        (void)lsh_seed();
        if (lsh_functions < 1) throw ConfigError("k must be >= 1");
        if (height < 2 || height > 32) throw ConfigError("L must be in [2, 32]");
        if (lsh_window <= 0) throw ConfigError("lsh_window must be > 0");
    }

    void set(const std::string& key, const std::string& value) {
        if (key == "master_key") master_key_hex = value;
        else if (key == "lsh_seed") lsh_seed_hex = value;
        else if (key == "k") lsh_functions = std::stoi(value);
        else if (key == "lsh_window") lsh_window = std::stod(value);
        else if (key == "height") height = std::stoi(value);
        else if (key == "index_path") index_path = value;
        else if (key == "ledger_path") ledger_path = value;
        else if (key == "repo_path") repo_path = value;
        else if (key == "store_dir") store_dir = value;
        else if (key == "journal_path") journal_path = value;
        else if (key == "debug_journal") debug_journal = (value == "1" || value == "true");
        else throw ConfigError("unknown config key: " + key);
    }

    static Config load(const std::string& file_path) {
        std::ifstream in(file_path);
        if (!in) throw ConfigError("cannot open config file: " + file_path);
        Config cfg;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("malformed config line: " + line);
            cfg.set(line.substr(0, eq), line.substr(eq + 1));
        }
        cfg.apply_env_overrides();
        cfg.validate();
        return cfg;
    }

    void apply_env_overrides() {
        static const std::pair<const char*, const char*> vars[] = {
            {"DVFS_MASTER_KEY", "master_key"}, {"DVFS_LSH_SEED", "lsh_seed"},
            {"DVFS_K", "k"},                   {"DVFS_LSH_WINDOW", "lsh_window"},
            {"DVFS_HEIGHT", "height"},         {"DVFS_INDEX_PATH", "index_path"},
            {"DVFS_LEDGER_PATH", "ledger_path"}, {"DVFS_REPO_PATH", "repo_path"},
            {"DVFS_STORE_DIR", "store_dir"},   {"DVFS_JOURNAL_PATH", "journal_path"},
            {"DVFS_DEBUG_JOURNAL", "debug_journal"}};
        for (auto [env, key] : vars)
            if (const char* v = std::getenv(env)) set(key, v);
    }

    void save(const std::string& file_path) const {
        std::ofstream out(file_path, std::ios::trunc);
        if (!out) throw ConfigError("cannot write config file: " + file_path);
        out << "master_key=" << master_key_hex << "\n"
            << "lsh_seed=" << lsh_seed_hex << "\n"
            << "k=" << lsh_functions << "\n"
            << "lsh_window=" << lsh_window << "\n"
            << "height=" << height << "\n"
            << "index_path=" << index_path << "\n"
            << "ledger_path=" << ledger_path << "\n"
            << "repo_path=" << repo_path << "\n"
            << "store_dir=" << store_dir << "\n"
            << "journal_path=" << journal_path << "\n"
            << "debug_journal=" << (debug_journal ? 1 : 0) << "\n";
    }
};

}  // namespace dvfs
