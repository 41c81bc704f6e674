#pragma once

// Output plumbing: CSV traces (12+ significant digits, stable column
// order) and verification reports in human-readable and machine-readable
// forms (one check per line).

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "smhd/harness.hpp"

namespace smhd {

// Scientific notation with 12 significant digits.
std::string format_number(double v);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<double>& values);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

void print_report(std::ostream& os, const VerificationReport& rep);

// One line per check: check,<name>,<lhs>,<ci95>,<rhs>,<margin>,<pass|fail|skip>
void print_report_machine(std::ostream& os, const VerificationReport& rep);

}  // namespace smhd
