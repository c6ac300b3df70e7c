#pragma once

// Synthetic publication exports for command-level tests.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace fixture {

namespace fs = std::filesystem;

// A fresh, empty directory under the system temp dir.
inline fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fwci_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

// `n_awards` awards with 1..max_papers papers each. FWCI values are lognormal
// (mu, sigma); about 3% of papers are uncited (FWCI 0) and a handful are
// reviews. Returns the CSV text; budgets go to `budgets` when non-null.
inline std::string synthetic_export(int n_awards, int max_papers, double mu, double sigma, unsigned long long seed,
                                    std::string* budgets = nullptr) {
    std::mt19937_64 gen(seed);
    std::lognormal_distribution<double> fwci(mu, sigma);
    std::uniform_int_distribution<int> papers(1, max_papers);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::ostringstream csv;
    csv.precision(17);
    csv << "award_code,year,pub_type,fwci,citations,title,source_id\n";
    if (budgets) *budgets = "award_code,budget_eur\n";
    long id = 0;
    for (int a = 0; a < n_awards; ++a) {
        char code[32];
        std::snprintf(code, sizeof code, "%02d/IA/%04d", 12 + a % 4, 1000 + a);
        const int n = papers(gen);
        for (int p = 0; p < n; ++p) {
            const double r = u(gen);
            const char* type = r < 0.04 ? "Review" : (r < 0.2 ? "Conference Paper" : "Article");
            const double value = u(gen) < 0.03 ? 0.0 : fwci(gen);
            csv << (a % 3 == 0 ? "SFI/" : "") << code << "," << 2013 + p % 8 << "," << type << "," << value << ","
                << static_cast<long>(value * 10) << ",\"Paper " << id << ", part " << p << "\",id" << id << "\n";
            ++id;
        }
        if (budgets) *budgets += std::string(code) + "," + std::to_string(500000 + 10000 * (a % 50)) + "\n";
    }
    return csv.str();
}

}  // namespace fixture
