#include "fpa/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fpa/textio.hpp"

namespace fpa {

namespace {

std::vector<double> load_bid_log(const std::string& path) {
    auto lines = read_lines(path);
    std::vector<double> values;
    long bid_col = -1;
    size_t first_data = 0;

    // header detection: a first line that does not parse as a number selects
    // the CSV-with-'bid'-column format
    for (size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto fields = split(trim(lines[i]), ',');
        bool numeric = true;
        try {
            parse_double(fields[0], path);
        } catch (const ParseError&) {
            numeric = false;
        }
        if (!numeric) {
            for (size_t c = 0; c < fields.size(); ++c)
                if (trim(fields[c]) == "bid") bid_col = static_cast<long>(c);
            if (bid_col < 0) throw ParseError(path + ":" + std::to_string(i + 1) + ": no 'bid' column");
            first_data = i + 1;
        }
        break;
    }

    for (size_t i = first_data; i < lines.size(); ++i) {
        const std::string t = trim(lines[i]);
        if (t.empty()) continue;
        const std::string ctx = path + ":" + std::to_string(i + 1);
        double v;
        if (bid_col >= 0) {
            auto fields = split(t, ',');
            if (static_cast<size_t>(bid_col) >= fields.size())
                throw ParseError(ctx + ": missing bid column");
            v = parse_double(fields[static_cast<size_t>(bid_col)], ctx);
        } else {
            v = parse_double(t, ctx);
        }
        if (!std::isfinite(v) || v < 0.0) throw ParseError(ctx + ": bids must be finite and >= 0");
        values.push_back(v);
    }
    if (values.empty()) throw ParseError(path + ": no bids found");
    return values;
}

}  // namespace

std::vector<double> filter_and_normalize(std::vector<double> values, Prob quantile) {
    if (!(quantile > 0.0 && quantile <= 1.0))
        throw ValidationError("quantile must lie in (0,1]");
    std::sort(values.begin(), values.end());
    if (quantile < 1.0) {
        const auto n = static_cast<double>(values.size());
        auto rank = static_cast<size_t>(std::ceil(quantile * n - 1e-12));
        rank = std::clamp<size_t>(rank, 1, values.size());
        const double threshold = values[rank - 1];
        values.erase(std::lower_bound(values.begin(), values.end(), threshold), values.end());
        if (values.empty())
            throw EmptyAfterFilterError("no bids remain below the quantile threshold");
    }
    const double max = values.back();
    if (!(max > 0.0)) throw EmptyAfterFilterError("all surviving bids are zero");
    for (double& v : values) v /= max;
    values.back() = 1.0;
    return values;
}

EmpiricalSamples load_and_normalize(const std::string& path, Prob quantile) {
    return EmpiricalSamples{filter_and_normalize(load_bid_log(path), quantile)};
}

void write_empirical_file(const std::string& path, const std::vector<double>& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open output file: " + path);
    for (double v : values) out << format_g12(v) << '\n';
}

}  // namespace fpa
