// mode_catalog.hpp — ingestion and validation of mechanical-mode tables.
//
// Catalog CSV format (UTF-8, LF or CRLF, '#' starts a comment line):
//   family,index,freq_mhz,m_eff_pg,u_zpf_fm,g_max_khz
// with family in {F, L, T} and u_zpf_fm optionally empty. Reference coupling
// CSV: family,index,theta_sq,eta_sq. All unit conversions to SI happen here,
// exactly once; records are kept sorted by (family, index) so that downstream
// mode sums run in one canonical, reproducible order.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phonon/units.hpp"

namespace phonon {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

enum class ModeFamily { Flexural, Longitudinal, Torsional };

char family_tag(ModeFamily family);
std::optional<ModeFamily> family_from_tag(char tag);

struct ModeRecord {
    ModeFamily family = ModeFamily::Flexural;
    int index = 1;  // the m in F_m / L_m / T_m
    AngularFrequency omega;
    Mass m_eff;
    std::optional<Length> u_zpf;  // tabulated value; recomputable from m_eff and omega
    AngularFrequency g_max;

    // sqrt(hbar / (2 m_eff omega))
    [[nodiscard]] Length computed_u_zpf() const;
};

// Immutable, canonically ordered mode collection for one structure variant.
class ModeCatalog {
public:
    ModeCatalog(std::string structure_label, std::vector<ModeRecord> records);

    [[nodiscard]] const std::string& structure_label() const { return structure_label_; }
    [[nodiscard]] std::span<const ModeRecord> records() const { return records_; }
    [[nodiscard]] std::size_t size() const { return records_.size(); }
    [[nodiscard]] const ModeRecord* find(ModeFamily family, int index) const;

private:
    std::string structure_label_;
    std::vector<ModeRecord> records_;
};

struct ReferenceCoupling {
    ModeFamily family = ModeFamily::Flexural;
    int index = 1;
    double theta_sq = 0.0;
    double eta_sq = 0.0;
};

class ReferenceCouplingTable {
public:
    explicit ReferenceCouplingTable(std::vector<ReferenceCoupling> entries);

    [[nodiscard]] std::span<const ReferenceCoupling> entries() const { return entries_; }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] const ReferenceCoupling* find(ModeFamily family, int index) const;

private:
    std::vector<ReferenceCoupling> entries_;
};

ModeCatalog parse_mode_table(std::istream& in, std::string structure_label);
void serialize_mode_table(const ModeCatalog& catalog, std::ostream& out);

ReferenceCouplingTable parse_reference_couplings(std::istream& in);

// One record whose tabulated zero-point displacement disagrees with
// sqrt(hbar/(2 m omega)) beyond the requested relative tolerance.
struct ZpfDiscrepancy {
    ModeFamily family = ModeFamily::Flexural;
    int index = 1;
    Length tabulated;
    Length computed;
    double relative_deviation = 0.0;   // |tabulated - computed| / computed
    double absolute_difference = 0.0;  // |tabulated - computed| in meters
};

// Reporting only: records without u_zpf are skipped, nothing is corrected.
std::vector<ZpfDiscrepancy> validate_zpf(const ModeCatalog& catalog, double relative_tolerance);

}  // namespace phonon
