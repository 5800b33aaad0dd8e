#include "sing/sample_matrix.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sing/errors.hpp"

namespace sing {

void write_samples_csv(const std::string& path, const SampleMatrix& m) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("write_samples_csv: cannot open " + path);
    for (std::size_t l = 0; l < m.n; ++l) {
        for (std::size_t j = 0; j < m.d; ++j)
            std::fprintf(f, j + 1 == m.d ? "%.17g\n" : "%.17g,", m(l, j));
    }
    std::fclose(f);
}

SampleMatrix read_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("read_samples_csv: cannot open " + path);
    SampleMatrix m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t cols = 0;
        while (std::getline(ss, cell, ',')) {
            m.values.push_back(std::stod(cell));
            ++cols;
        }
        if (m.n == 0)
            m.d = cols;
        else if (cols != m.d)
            throw Error("read_samples_csv: inconsistent column count at row " +
                        std::to_string(m.n + 1));
        ++m.n;
    }
    if (m.n == 0) throw Error("read_samples_csv: no rows in " + path);
    return m;
}

}  // namespace sing
