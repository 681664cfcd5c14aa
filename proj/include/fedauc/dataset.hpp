#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fedauc/error.hpp"

namespace fedauc {

struct Sample {
    double score;  // classifier output in [0,1]
    int label;     // 0 or 1
};

// Immutable evaluation set of (score, label) records.
class Dataset {
public:
    Dataset() = default;

    explicit Dataset(std::vector<Sample> records) : records_(std::move(records)) {
        for (size_t i = 0; i < records_.size(); ++i) {
            const Sample& s = records_[i];
            if (!std::isfinite(s.score) || s.score < 0.0 || s.score > 1.0)
                throw InvalidInputError("score out of [0,1] at record " + std::to_string(i));
            if (s.label != 0 && s.label != 1)
                throw InvalidInputError("label not in {0,1} at record " + std::to_string(i));
        }
    }

    size_t size() const { return records_.size(); }
    const Sample& operator[](size_t i) const { return records_[i]; }
    const std::vector<Sample>& records() const { return records_; }

    int64_t positives() const {
        int64_t p = 0;
        for (const Sample& s : records_) p += s.label;
        return p;
    }
    int64_t negatives() const { return static_cast<int64_t>(size()) - positives(); }

    std::vector<double> scores() const {
        std::vector<double> out;
        out.reserve(size());
        for (const Sample& s : records_) out.push_back(s.score);
        return out;
    }

    std::vector<int> labels() const {
        std::vector<int> out;
        out.reserve(size());
        for (const Sample& s : records_) out.push_back(s.label);
        return out;
    }

private:
    std::vector<Sample> records_;
};

// CSV format: header "score,label", then one "0.37,1" record per line.
inline Dataset load_csv(std::istream& in) {
    std::vector<Sample> records;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1 && line.rfind("score", 0) == 0) continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw InvalidInputError("line " + std::to_string(lineno) + ": expected score,label");
        try {
            size_t pos = 0;
            double score = std::stod(line.substr(0, comma), &pos);
            std::string label_str = line.substr(comma + 1);
            // strip trailing CR from CRLF files
            while (!label_str.empty() && (label_str.back() == '\r' || label_str.back() == ' '))
                label_str.pop_back();
            if (label_str != "0" && label_str != "1")
                throw InvalidInputError("line " + std::to_string(lineno) + ": label must be 0 or 1");
            records.push_back({score, label_str == "1" ? 1 : 0});
        } catch (const InvalidInputError&) {
            throw;
        } catch (const std::exception&) {
            throw InvalidInputError("line " + std::to_string(lineno) + ": malformed record");
        }
    }
    return Dataset(std::move(records));
}

inline Dataset load_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open " + path);
    return load_csv(in);
}

inline void save_csv(const Dataset& ds, std::ostream& out) {
    out << "score,label\n";
    char buf[64];
    for (const Sample& s : ds.records()) {
        snprintf(buf, sizeof(buf), "%.17g,%d\n", s.score, s.label);
        out << buf;
    }
}

}  // namespace fedauc
