#include "smhd/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "smhd/errors.hpp"

namespace smhd {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

struct CsvWriter::Impl {
    std::ofstream file;
    std::size_t columns = 0;
};

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& columns)
    : impl_(std::make_unique<Impl>()) {
    impl_->file.open(path);
    if (!impl_->file)
        throw InvalidParameterError("cannot open CSV for writing: " + path);
    impl_->columns = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) impl_->file << ",";
        impl_->file << columns[i];
    }
    impl_->file << "\n";
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != impl_->columns)
        throw InvalidParameterError("CSV row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) impl_->file << ",";
        impl_->file << format_number(values[i]);
    }
    impl_->file << "\n";
}

void print_report(std::ostream& os, const VerificationReport& rep) {
    os << "== " << rep.title << " (" << rep.paths << " paths, "
       << format_number(rep.wall_seconds) << " s)\n";
    for (const auto& c : rep.checks) {
        if (!c.applicable) {
            os << "  [skip] " << c.name
               << (c.note.empty() ? "" : "  (" + c.note + ")") << "\n";
            continue;
        }
        os << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name
           << ": lhs=" << format_number(c.lhs)
           << " ci95=" << format_number(c.ci95)
           << " rhs=" << format_number(c.rhs)
           << " margin=" << format_number(c.margin);
        if (!c.note.empty()) os << "  (" << c.note << ")";
        os << "\n";
    }
    for (const auto& [k, v] : rep.details)
        os << "  detail " << k << " = " << format_number(v) << "\n";
    os << "result: " << (rep.pass() ? "PASS" : "FAIL") << "\n";
}

void print_report_machine(std::ostream& os, const VerificationReport& rep) {
    for (const auto& c : rep.checks)
        os << "check," << c.name << "," << format_number(c.lhs) << ","
           << format_number(c.ci95) << "," << format_number(c.rhs) << ","
           << format_number(c.margin) << ","
           << (!c.applicable ? "skip" : c.pass ? "pass" : "fail") << "\n";
    for (const auto& [k, v] : rep.details)
        os << "detail," << k << "," << format_number(v) << "\n";
    // No timing here: the machine-readable artifact must be byte-stable
    // across replays and thread counts.
    os << "report," << rep.title << "," << rep.paths << ","
       << (rep.pass() ? "pass" : "fail") << "\n";
}

}  // namespace smhd
