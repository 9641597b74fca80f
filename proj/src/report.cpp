#include "olrwa/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "olrwa/error.hpp"
#include "olrwa/text_format.hpp"

namespace olrwa::report {

using text::format_double;

std::string runs_csv(const evaluation::BenchmarkReport& report) {
    std::ostringstream out;
    out << "model,seed,fold,r2_final,mse\n";
    for (const auto& r : report.runs) {
        out << r.model << ',' << r.seed << ',' << r.fold << ',' << format_double(r.r2) << ',' << format_double(r.mse)
            << '\n';
    }
    return out.str();
}

std::string summary_csv(const evaluation::BenchmarkReport& report) {
    std::ostringstream out;
    out << "model,runs,mean_r2,std_r2,mean_mse\n";
    for (const auto& s : report.summary) {
        out << s.model << ',' << s.runs << ',' << format_double(s.mean_r2) << ',' << format_double(s.std_r2) << ','
            << format_double(s.mean_mse) << '\n';
    }
    return out.str();
}

std::string timings_csv(const evaluation::BenchmarkReport& report) {
    std::ostringstream out;
    out << "model,seed,fold,runtime_ms\n";
    for (const auto& r : report.runs) {
        out << r.model << ',' << r.seed << ',' << r.fold << ',' << format_double(r.runtime_ms) << '\n';
    }
    return out.str();
}

std::string curve_csv(const std::vector<evaluation::EvalRecord>& records) {
    std::ostringstream out;
    out << "points_seen,r2,mse\n";
    for (const auto& r : records) {
        out << r.points_seen << ',' << format_double(r.r2) << ',' << format_double(r.mse) << '\n';
    }
    return out.str();
}

std::string format_r2(double r2) {
    if (!(r2 > 0.0)) return "N/A";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5f", r2);
    return buf;
}

std::string render_table(const std::vector<TableRow>& rows) {
    std::size_t width = 5;
    for (const auto& r : rows) width = std::max(width, r.label.size());
    const auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(s.size(), w), ' ');
        return s;
    };
    std::ostringstream out;
    out << pad("model", width) << "  runs  mean_r2   std_r2    mean_mse\n";
    for (const auto& r : rows) {
        char tail[96];
        std::snprintf(tail, sizeof tail, "  %4zu  %-8s  %-8.5f  %.6g", r.summary.runs, format_r2(r.summary.mean_r2).c_str(),
                      r.summary.std_r2, r.summary.mean_mse);
        out << pad(r.label, width) << tail << '\n';
    }
    return out.str();
}

std::string render_report(const std::string& title, const evaluation::BenchmarkReport& report) {
    std::vector<TableRow> rows;
    for (const auto& s : report.summary) rows.push_back({s.model, s});
    std::ostringstream out;
    out << title << "\n\n" << render_table(rows) << "\nN/A: R-squared <= 0\n\nhyperparameters:\n";
    for (const auto& h : report.hyperparameters) out << "  " << h << '\n';
    return out.str();
}

std::vector<evaluation::RunResult> parse_runs_csv(const std::string& text) {
    std::vector<evaluation::RunResult> runs;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;
        const auto fields = text::split(line, ',');
        const auto fail = [&] {
            throw Error(ErrorCode::ParseError, "runs.csv:" + std::to_string(line_no) + ": malformed record");
        };
        if (fields.size() != 5) fail();
        evaluation::RunResult r;
        r.model = std::string(fields[0]);
        const auto integer = [&](std::string_view f, auto& out) {
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
            if (ec != std::errc() || ptr != f.data() + f.size()) fail();
        };
        integer(fields[1], r.seed);
        integer(fields[2], r.fold);
        const auto r2 = text::parse_double(fields[3]);
        const auto mse = text::parse_double(fields[4]);
        if (!r2 || !mse) fail();
        r.r2 = *r2;
        r.mse = *mse;
        runs.push_back(r);
    }
    return runs;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << content;
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

} // namespace olrwa::report
