#include "phonon/mode_catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <tuple>
#include <utility>

namespace phonon {
namespace {

constexpr std::size_t kModeColumns = 6;
constexpr std::size_t kReferenceColumns = 4;
const char* const kModeHeader = "family,index,freq_mhz,m_eff_pg,u_zpf_fm,g_max_khz";
const char* const kReferenceHeader = "family,index,theta_sq,eta_sq";

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

// Strict decimal/scientific parse of the whole token; no separators, no nan/inf.
double parse_double(const std::string& token, std::size_t line, std::size_t column) {
    std::string t = token;
    if (!t.empty() && t.front() == '+') t.erase(t.begin());
    if (t.empty()) throw ParseError("empty numeric field", line, column);
    double value = 0.0;
    const char* begin = t.data();
    const char* end = begin + t.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError("malformed number '" + token + "'", line, column);
    }
    if (!std::isfinite(value)) {
        throw ParseError("non-finite number '" + token + "'", line, column);
    }
    return value;
}

int parse_index(const std::string& token, std::size_t line, std::size_t column) {
    int value = 0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || value < 1) {
        throw ParseError("mode index must be a positive integer, got '" + token + "'", line,
                         column);
    }
    return value;
}

ModeFamily parse_family(const std::string& token, std::size_t line) {
    if (token.size() == 1) {
        if (auto family = family_from_tag(token.front())) return *family;
    }
    throw ParseError("unknown mode family '" + token + "' (expected F, L or T)", line, 1);
}

// Reads logical lines, strips CR, skips comments and blank lines.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& out, std::size_t& line_number) {
        std::string raw;
        while (std::getline(in_, raw)) {
            ++line_;
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            const std::string stripped = trim(raw);
            if (stripped.empty() || stripped.front() == '#') continue;
            out = raw;
            line_number = line_;
            return true;
        }
        return false;
    }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

void expect_header(const std::string& line, const char* expected, std::size_t line_number) {
    std::string normalized;
    for (const auto& f : split_fields(line)) {
        if (!normalized.empty()) normalized += ',';
        normalized += f;
    }
    if (normalized != expected) {
        throw ParseError("unexpected header '" + line + "' (expected '" + expected + "')",
                         line_number, 1);
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

constexpr auto canonical_key = [](const auto& r) { return std::pair(r.family, r.index); };

}  // namespace

char family_tag(ModeFamily family) {
    switch (family) {
        case ModeFamily::Flexural: return 'F';
        case ModeFamily::Longitudinal: return 'L';
        case ModeFamily::Torsional: return 'T';
    }
    return '?';
}

std::optional<ModeFamily> family_from_tag(char tag) {
    switch (tag) {
        case 'F': return ModeFamily::Flexural;
        case 'L': return ModeFamily::Longitudinal;
        case 'T': return ModeFamily::Torsional;
        default: return std::nullopt;
    }
}

Length ModeRecord::computed_u_zpf() const {
    return Length{std::sqrt(constants::hbar / (2.0 * m_eff.value() * omega.value()))};
}

ModeCatalog::ModeCatalog(std::string structure_label, std::vector<ModeRecord> records)
    : structure_label_(std::move(structure_label)), records_(std::move(records)) {
    if (records_.empty()) {
        throw std::invalid_argument("empty catalog");
    }
    for (const ModeRecord& r : records_) {
        if (!(r.omega.value() > 0.0)) {
            throw std::invalid_argument("mode frequency must be positive");
        }
        if (!(r.m_eff.value() > 0.0)) {
            throw std::invalid_argument("effective mass must be positive");
        }
        if (r.g_max.value() < 0.0) {
            throw std::invalid_argument("coupling must be non-negative");
        }
        if (r.u_zpf && !(r.u_zpf->value() > 0.0)) {
            throw std::invalid_argument("tabulated zero-point displacement must be positive");
        }
    }
    std::sort(records_.begin(), records_.end(), [](const ModeRecord& x, const ModeRecord& y) {
        return canonical_key(x) < canonical_key(y);
    });
    const auto dup = std::adjacent_find(
        records_.begin(), records_.end(),
        [](const ModeRecord& x, const ModeRecord& y) { return canonical_key(x) == canonical_key(y); });
    if (dup != records_.end()) {
        throw std::invalid_argument(std::string("duplicate mode ") + family_tag(dup->family) +
                                    std::to_string(dup->index));
    }
}

const ModeRecord* ModeCatalog::find(ModeFamily family, int index) const {
    const auto it = std::lower_bound(
        records_.begin(), records_.end(), std::pair(family, index),
        [](const ModeRecord& r, const std::pair<ModeFamily, int>& key) {
            return canonical_key(r) < key;
        });
    if (it == records_.end() || it->family != family || it->index != index) return nullptr;
    return &*it;
}

ReferenceCouplingTable::ReferenceCouplingTable(std::vector<ReferenceCoupling> entries)
    : entries_(std::move(entries)) {
    if (entries_.empty()) {
        throw std::invalid_argument("empty reference coupling table");
    }
    for (const ReferenceCoupling& e : entries_) {
        if (e.theta_sq < 0.0 || e.eta_sq < 0.0) {
            throw std::invalid_argument("reference couplings must be non-negative");
        }
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const ReferenceCoupling& x, const ReferenceCoupling& y) {
                  return canonical_key(x) < canonical_key(y);
              });
    const auto dup = std::adjacent_find(entries_.begin(), entries_.end(),
                                        [](const ReferenceCoupling& x, const ReferenceCoupling& y) {
                                            return canonical_key(x) == canonical_key(y);
                                        });
    if (dup != entries_.end()) {
        throw std::invalid_argument(std::string("duplicate reference entry ") +
                                    family_tag(dup->family) + std::to_string(dup->index));
    }
}

const ReferenceCoupling* ReferenceCouplingTable::find(ModeFamily family, int index) const {
    const auto it = std::lower_bound(
        entries_.begin(), entries_.end(), std::pair(family, index),
        [](const ReferenceCoupling& e, const std::pair<ModeFamily, int>& key) {
            return canonical_key(e) < key;
        });
    if (it == entries_.end() || it->family != family || it->index != index) return nullptr;
    return &*it;
}

ModeCatalog parse_mode_table(std::istream& in, std::string structure_label) {
    LineReader reader(in);
    std::string line;
    std::size_t line_number = 0;
    if (!reader.next(line, line_number)) {
        throw ParseError("empty catalog", 1, 1);
    }
    expect_header(line, kModeHeader, line_number);

    std::vector<ModeRecord> records;
    while (reader.next(line, line_number)) {
        const auto fields = split_fields(line);
        if (fields.size() != kModeColumns) {
            throw ParseError("expected " + std::to_string(kModeColumns) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_number, fields.size());
        }
        ModeRecord record;
        record.family = parse_family(fields[0], line_number);
        record.index = parse_index(fields[1], line_number, 2);
        const double freq_mhz = parse_double(fields[2], line_number, 3);
        if (!(freq_mhz > 0.0)) {
            throw ParseError("frequency must be positive", line_number, 3);
        }
        const double m_eff_pg = parse_double(fields[3], line_number, 4);
        if (!(m_eff_pg > 0.0)) {
            throw ParseError("effective mass must be positive", line_number, 4);
        }
        std::optional<double> u_zpf_fm;
        if (!fields[4].empty()) {
            u_zpf_fm = parse_double(fields[4], line_number, 5);
            if (!(*u_zpf_fm > 0.0)) {
                throw ParseError("zero-point displacement must be positive", line_number, 5);
            }
        }
        const double g_max_khz = parse_double(fields[5], line_number, 6);
        if (g_max_khz < 0.0) {
            throw ParseError("coupling must be non-negative", line_number, 6);
        }

        record.omega = to_angular(megahertz(freq_mhz));
        record.m_eff = picograms(m_eff_pg);
        if (u_zpf_fm) record.u_zpf = femtometers(*u_zpf_fm);
        record.g_max = to_angular(kilohertz(g_max_khz));
        records.push_back(record);
    }
    if (records.empty()) {
        throw ParseError("empty catalog", line_number + 1, 1);
    }

    try {
        return ModeCatalog(std::move(structure_label), std::move(records));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_number, 1);
    }
}

void serialize_mode_table(const ModeCatalog& catalog, std::ostream& out) {
    out << kModeHeader << '\n';
    for (const ModeRecord& r : catalog.records()) {
        out << family_tag(r.family) << ',' << r.index << ','
            << format_double(to_ordinary(r.omega).value() / 1e6) << ','
            << format_double(r.m_eff.value() / 1e-15) << ',';
        if (r.u_zpf) out << format_double(r.u_zpf->value() / 1e-15);
        out << ',' << format_double(to_ordinary(r.g_max).value() / 1e3) << '\n';
    }
}

ReferenceCouplingTable parse_reference_couplings(std::istream& in) {
    LineReader reader(in);
    std::string line;
    std::size_t line_number = 0;
    if (!reader.next(line, line_number)) {
        throw ParseError("empty reference coupling table", 1, 1);
    }
    expect_header(line, kReferenceHeader, line_number);

    std::vector<ReferenceCoupling> entries;
    while (reader.next(line, line_number)) {
        const auto fields = split_fields(line);
        if (fields.size() != kReferenceColumns) {
            throw ParseError("expected " + std::to_string(kReferenceColumns) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_number, fields.size());
        }
        ReferenceCoupling entry;
        entry.family = parse_family(fields[0], line_number);
        entry.index = parse_index(fields[1], line_number, 2);
        entry.theta_sq = parse_double(fields[2], line_number, 3);
        entry.eta_sq = parse_double(fields[3], line_number, 4);
        if (entry.theta_sq < 0.0) {
            throw ParseError("theta_sq must be non-negative", line_number, 3);
        }
        if (entry.eta_sq < 0.0) {
            throw ParseError("eta_sq must be non-negative", line_number, 4);
        }
        entries.push_back(entry);
    }
    if (entries.empty()) {
        throw ParseError("empty reference coupling table", line_number + 1, 1);
    }

    try {
        return ReferenceCouplingTable(std::move(entries));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_number, 1);
    }
}

std::vector<ZpfDiscrepancy> validate_zpf(const ModeCatalog& catalog, double relative_tolerance) {
    if (!(relative_tolerance > 0.0)) {
        throw std::invalid_argument("validate_zpf: tolerance must be positive");
    }
    std::vector<ZpfDiscrepancy> discrepancies;
    for (const ModeRecord& r : catalog.records()) {
        if (!r.u_zpf) continue;
        const Length computed = r.computed_u_zpf();
        const double diff = std::abs(r.u_zpf->value() - computed.value());
        const double rel = diff / computed.value();
        if (rel > relative_tolerance) {
            discrepancies.push_back(
                ZpfDiscrepancy{r.family, r.index, *r.u_zpf, computed, rel, diff});
        }
    }
    return discrepancies;
}

}  // namespace phonon
