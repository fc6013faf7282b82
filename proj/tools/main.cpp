// phonon-sps — command-line front end for the phonon dephasing engine.
//
// Subcommands: couplings, validate, indist, sweep, spectrum, table1.
// Exit codes: 0 success, 1 computation failure, 2 input/usage error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phonon/coupling.hpp"
#include "phonon/indistinguishability.hpp"
#include "phonon/mode_catalog.hpp"
#include "phonon/propagator.hpp"
#include "phonon/units.hpp"

namespace {

using nlohmann::json;

// input/usage problems map to exit code 2
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fixtures_dir() {
    if (const char* env = std::getenv("PHONON_FIXTURES_DIR")) {
        return env;
    }
#ifdef PHONON_DATA_DIR
    return PHONON_DATA_DIR;
#else
    return "data";
#endif
}

// 12 significant digits, decimal scientific
std::string fmt_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct OutputOptions {
    std::string out_path;  // empty = stdout
    std::string format = "csv";
    bool no_timestamp = false;
};

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
    cmd->add_option("--out", opts.out_path, "output file (default: stdout)");
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_flag("--no-timestamp", opts.no_timestamp, "omit the generation timestamp");
}

void emit(const OutputOptions& opts, const std::string& content) {
    if (opts.out_path.empty()) {
        std::cout << content;
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(opts.out_path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw UsageError("cannot open output file " + tmp.string());
        }
        out << content;
        if (!out) {
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

std::string json_dump(const json& j) { return j.dump(2) + "\n"; }

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot open " + path);
    }
    return in;
}

std::string catalog_label_from_path(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

phonon::ModeCatalog load_catalog(const std::string& path, std::string label = {}) {
    auto in = open_input(path);
    if (label.empty()) label = catalog_label_from_path(path);
    try {
        return phonon::parse_mode_table(in, std::move(label));
    } catch (const phonon::ParseError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

phonon::ReferenceCouplingTable load_reference(const std::string& path) {
    auto in = open_input(path);
    try {
        return phonon::parse_reference_couplings(in);
    } catch (const phonon::ParseError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

phonon::QdPosition parse_position(const std::string& name) {
    if (name == "axis") return phonon::QdPosition::OnAxis;
    if (name == "sidewall") return phonon::QdPosition::OnSidewall;
    throw UsageError("unknown position '" + name + "' (expected axis or sidewall)");
}

const char* position_name(phonon::QdPosition position) {
    return position == phonon::QdPosition::OnAxis ? "axis" : "sidewall";
}

struct Range {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;

    [[nodiscard]] std::vector<double> points() const {
        std::vector<double> pts(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            pts[static_cast<std::size_t>(i)] =
                count == 1 ? start
                           : start + (stop - start) * static_cast<double>(i) /
                                         static_cast<double>(count - 1);
        }
        return pts;
    }
};

Range parse_range(const std::string& spec) {
    Range r;
    char trailing = '\0';
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &r.start, &r.stop, &r.count, &trailing) != 3) {
        throw UsageError("malformed range '" + spec + "' (expected start:stop:count)");
    }
    if (r.count < 1) {
        throw UsageError("range count must be at least 1");
    }
    if (r.stop < r.start) {
        throw UsageError("range stop must not be below start");
    }
    return r;
}

// scenario flags shared by indist/sweep/spectrum
struct ScenarioOptions {
    std::string modes_path;
    double temperature = 4.0;
    std::string position;
    double purcell = 0.0;
    double gamma_bulk_ghz = 1.0;
    double gamma_b_rel = 0.05;
    std::optional<double> supplied_efficiency;
    std::optional<double> supplied_overlap;
    double rel_tol = 1e-8;
};

void add_scenario_options(CLI::App* cmd, ScenarioOptions& opts, bool with_efficiency,
                          bool core_required = true) {
    auto* modes = cmd->add_option("--modes", opts.modes_path, "mode catalog CSV");
    cmd->add_option("--temperature", opts.temperature, "bath temperature [K]")
        ->capture_default_str();
    auto* position = cmd->add_option("--position", opts.position, "emitter position: axis|sidewall");
    auto* purcell = cmd->add_option("--purcell", opts.purcell, "Purcell factor F_p");
    if (core_required) {
        modes->required();
        position->required();
        purcell->required();
    }
    cmd->add_option("--gamma-bulk-ghz", opts.gamma_bulk_ghz, "bulk emission rate [GHz]")
        ->capture_default_str();
    cmd->add_option("--gamma-b-rel", opts.gamma_b_rel,
                    "background emission rate relative to the bulk rate")
        ->capture_default_str();
    if (with_efficiency) {
        cmd->add_option("--efficiency", opts.supplied_efficiency,
                        "collection efficiency (supplied directly)");
        cmd->add_option("--overlap", opts.supplied_overlap,
                        "Gaussian overlap; efficiency becomes beta * overlap");
    }
    cmd->add_option("--rel-tol", opts.rel_tol, "quadrature relative tolerance")
        ->capture_default_str();
}

phonon::Scenario make_scenario(const ScenarioOptions& opts, const std::string& label,
                               bool default_unit_efficiency) {
    phonon::Scenario scenario;
    scenario.catalog_label = label;
    scenario.temperature = phonon::kelvin(opts.temperature);
    scenario.position = parse_position(opts.position);
    scenario.purcell = opts.purcell;
    scenario.gamma_bulk = phonon::per_second(opts.gamma_bulk_ghz * 1e9);
    scenario.gamma_background =
        phonon::per_second(opts.gamma_b_rel * scenario.gamma_bulk.value());
    scenario.efficiency = opts.supplied_efficiency;
    scenario.gaussian_overlap = opts.supplied_overlap;
    if (!scenario.efficiency && !scenario.gaussian_overlap && default_unit_efficiency) {
        scenario.efficiency = 1.0;
    }
    try {
        scenario.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return scenario;
}

phonon::QuadratureConfig quadrature_config(double rel_tol) {
    phonon::QuadratureConfig cfg;
    cfg.rel_tol = rel_tol;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

void append_header_comment(std::ostringstream& out, const std::string& command,
                           const OutputOptions& opts) {
    out << "# phonon-sps " << command << '\n';
    if (!opts.no_timestamp) {
        out << "# generated: " << timestamp_utc() << '\n';
    }
}

// ---------------------------------------------------------------- couplings

struct CouplingsArgs {
    std::string modes_path;
    double temperature = 4.0;
    std::string position = "sidewall";
    OutputOptions output;
};

int run_couplings(const CouplingsArgs& args) {
    const auto catalog = load_catalog(args.modes_path);
    const auto position = parse_position(args.position);
    const auto couplings =
        phonon::build_coupling_set(catalog, phonon::kelvin(args.temperature), position);

    if (args.output.format == "json") {
        json j;
        j["command"] = "couplings";
        j["catalog"] = catalog.structure_label();
        j["temperature_k"] = args.temperature;
        j["position"] = position_name(position);
        if (!args.output.no_timestamp) j["generated"] = timestamp_utc();
        json modes = json::array();
        for (const auto& e : couplings.entries()) {
            modes.push_back({{"family", std::string(1, phonon::family_tag(e.family))},
                             {"index", e.index},
                             {"freq_mhz", phonon::to_ordinary(e.omega).value() / 1e6},
                             {"eta_sq", e.eta_sq},
                             {"theta_sq", e.theta_sq},
                             {"occupation", e.occupation}});
        }
        j["modes"] = std::move(modes);
        emit(args.output, json_dump(j));
    } else {
        std::ostringstream out;
        append_header_comment(out, "couplings", args.output);
        out << "# catalog: " << catalog.structure_label() << '\n';
        out << "# temperature_k: " << fmt_sci(args.temperature) << '\n';
        out << "# position: " << position_name(position) << '\n';
        out << "family,index,freq_mhz,eta_sq,theta_sq,occupation\n";
        for (const auto& e : couplings.entries()) {
            out << phonon::family_tag(e.family) << ',' << e.index << ','
                << fmt_sci(phonon::to_ordinary(e.omega).value() / 1e6) << ','
                << fmt_sci(e.eta_sq) << ',' << fmt_sci(e.theta_sq) << ','
                << fmt_sci(e.occupation) << '\n';
        }
        emit(args.output, out.str());
    }
    return 0;
}

// ----------------------------------------------------------------- validate

struct ValidateArgs {
    std::string modes_path;
    std::string reference_path;
    double temperature = 4.0;
    double tolerance = 0.03;
    OutputOptions output;
};

int run_validate(const ValidateArgs& args) {
    const auto catalog = load_catalog(args.modes_path);
    const auto reference = load_reference(args.reference_path);
    // reference couplings tabulate flexural modes at the sidewall maximum
    const auto couplings = phonon::build_coupling_set(catalog, phonon::kelvin(args.temperature),
                                                      phonon::QdPosition::OnSidewall);

    std::vector<std::string> orphans;
    for (const auto& e : couplings.entries()) {
        if (!reference.find(e.family, e.index)) {
            orphans.push_back(std::string(1, phonon::family_tag(e.family)) +
                              std::to_string(e.index) + " (catalog only)");
        }
    }
    for (const auto& r : reference.entries()) {
        if (std::none_of(couplings.entries().begin(), couplings.entries().end(),
                         [&](const auto& e) {
                             return e.family == r.family && e.index == r.index;
                         })) {
            orphans.push_back(std::string(1, phonon::family_tag(r.family)) +
                              std::to_string(r.index) + " (reference only)");
        }
    }
    if (!orphans.empty()) {
        std::string msg = "mode keys do not match:";
        for (const auto& o : orphans) msg += " " + o;
        throw UsageError(msg);
    }

    struct Row {
        char family;
        int index;
        double freq_mhz;
        double eta_computed, eta_reference, eta_dev;
        double theta_computed, theta_reference, theta_dev;
    };
    std::vector<Row> rows;
    std::map<char, std::pair<double, double>> family_max;  // family -> (eta, theta)
    for (const auto& e : couplings.entries()) {
        const auto* r = reference.find(e.family, e.index);
        const double eta_dev = std::abs(e.eta_sq - r->eta_sq) / r->eta_sq;
        const double theta_dev = std::abs(e.theta_sq - r->theta_sq) / r->theta_sq;
        const char tag = phonon::family_tag(e.family);
        rows.push_back(Row{tag, e.index, phonon::to_ordinary(e.omega).value() / 1e6, e.eta_sq,
                           r->eta_sq, eta_dev, e.theta_sq, r->theta_sq, theta_dev});
        auto& fm = family_max[tag];
        fm.first = std::max(fm.first, eta_dev);
        fm.second = std::max(fm.second, theta_dev);
    }

    bool pass = true;
    std::vector<std::string> failures;
    for (const Row& row : rows) {
        if (row.eta_dev > args.tolerance || row.theta_dev > args.tolerance) {
            pass = false;
            failures.push_back(std::string(1, row.family) + std::to_string(row.index));
        }
    }

    if (args.output.format == "json") {
        json j;
        j["command"] = "validate";
        j["catalog"] = catalog.structure_label();
        j["temperature_k"] = args.temperature;
        j["tolerance"] = args.tolerance;
        if (!args.output.no_timestamp) j["generated"] = timestamp_utc();
        json jr = json::array();
        for (const Row& row : rows) {
            jr.push_back({{"family", std::string(1, row.family)},
                          {"index", row.index},
                          {"freq_mhz", row.freq_mhz},
                          {"eta_sq_computed", row.eta_computed},
                          {"eta_sq_reference", row.eta_reference},
                          {"eta_sq_rel_dev", row.eta_dev},
                          {"theta_sq_computed", row.theta_computed},
                          {"theta_sq_reference", row.theta_reference},
                          {"theta_sq_rel_dev", row.theta_dev}});
        }
        j["rows"] = std::move(jr);
        json fam;
        for (const auto& [tag, devs] : family_max) {
            fam[std::string(1, tag)] = {{"max_eta_sq_rel_dev", devs.first},
                                        {"max_theta_sq_rel_dev", devs.second}};
        }
        j["max_rel_dev_per_family"] = std::move(fam);
        j["status"] = pass ? "PASS" : "FAIL";
        if (!pass) j["failing_modes"] = failures;
        emit(args.output, json_dump(j));
    } else {
        std::ostringstream out;
        append_header_comment(out, "validate", args.output);
        out << "# catalog: " << catalog.structure_label() << '\n';
        out << "# temperature_k: " << fmt_sci(args.temperature) << '\n';
        out << "# tolerance: " << fmt_sci(args.tolerance) << '\n';
        out << "family,index,freq_mhz,eta_sq_computed,eta_sq_reference,eta_sq_rel_dev,"
               "theta_sq_computed,theta_sq_reference,theta_sq_rel_dev\n";
        for (const Row& row : rows) {
            out << row.family << ',' << row.index << ',' << fmt_sci(row.freq_mhz) << ','
                << fmt_sci(row.eta_computed) << ',' << fmt_sci(row.eta_reference) << ','
                << fmt_sci(row.eta_dev) << ',' << fmt_sci(row.theta_computed) << ','
                << fmt_sci(row.theta_reference) << ',' << fmt_sci(row.theta_dev) << '\n';
        }
        for (const auto& [tag, devs] : family_max) {
            out << "# max_rel_dev " << tag << ": eta_sq " << fmt_sci(devs.first) << ", theta_sq "
                << fmt_sci(devs.second) << '\n';
        }
        out << "# status: " << (pass ? "PASS" : "FAIL") << '\n';
        emit(args.output, out.str());
    }

    if (!pass) {
        std::cerr << "validate: FAIL at tolerance " << args.tolerance << ", modes:";
        for (const auto& f : failures) std::cerr << ' ' << f;
        std::cerr << '\n';
        return 1;
    }
    std::cerr << "validate: PASS at tolerance " << args.tolerance << '\n';
    return 0;
}

// ------------------------------------------------------------------- indist

json merit_to_json(const phonon::MeritReport& report) {
    return {{"catalog", report.scenario.catalog_label},
            {"temperature_k", report.scenario.temperature.value()},
            {"position", position_name(report.scenario.position)},
            {"purcell", report.purcell},
            {"gamma_bulk_per_s", report.scenario.gamma_bulk.value()},
            {"gamma_background_per_s", report.scenario.gamma_background.value()},
            {"beta", report.beta},
            {"efficiency", report.efficiency},
            {"indistinguishability", report.indistinguishability},
            {"product", report.product}};
}

void merit_to_csv(std::ostringstream& out, const phonon::MeritReport& report) {
    out << "catalog,temperature_k,position,purcell,gamma_bulk_per_s,gamma_background_per_s,"
           "beta,efficiency,indistinguishability,product\n";
    out << report.scenario.catalog_label << ',' << fmt_sci(report.scenario.temperature.value())
        << ',' << position_name(report.scenario.position) << ',' << fmt_sci(report.purcell) << ','
        << fmt_sci(report.scenario.gamma_bulk.value()) << ','
        << fmt_sci(report.scenario.gamma_background.value()) << ',' << fmt_sci(report.beta) << ','
        << fmt_sci(report.efficiency) << ',' << fmt_sci(report.indistinguishability) << ','
        << fmt_sci(report.product) << '\n';
}

struct IndistArgs {
    ScenarioOptions scenario;
    std::string preset;        // configuration label, e.g. "c" or "table1-c"
    std::string presets_path;  // preset file for --preset lookups
    OutputOptions output;
};

// Fills scenario fields from the named preset configuration; flags the user
// passed explicitly keep their values.
std::string apply_preset(const CLI::App* cmd, const IndistArgs& args, ScenarioOptions& opts) {
    json presets;
    {
        auto in = open_input(args.presets_path);
        try {
            presets = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError(args.presets_path + ": " + e.what());
        }
    }
    std::string label = args.preset;
    if (label.rfind("table1-", 0) == 0) label = label.substr(7);
    const json* config = nullptr;
    for (const auto& entry : presets.at("configurations")) {
        if (entry.at("label").get<std::string>() == label) {
            config = &entry;
            break;
        }
    }
    if (!config) {
        throw UsageError("unknown preset '" + args.preset + "'");
    }
    const std::string structure = config->at("structure").get<std::string>();
    if (!cmd->count("--modes")) {
        opts.modes_path = fixtures_dir() + "/modes_" + structure + ".csv";
    }
    if (!cmd->count("--temperature")) {
        opts.temperature = presets.at("temperature_k").get<double>();
    }
    if (!cmd->count("--position")) {
        opts.position = config->at("position").get<std::string>();
    }
    if (!cmd->count("--purcell")) {
        opts.purcell = config->at("purcell").get<double>();
    }
    if (!cmd->count("--gamma-bulk-ghz")) {
        opts.gamma_bulk_ghz = presets.at("gamma_bulk_hz").get<double>() / 1e9;
    }
    if (!cmd->count("--gamma-b-rel")) {
        opts.gamma_b_rel = config->at("gamma_b_rel").get<double>();
    }
    if (!cmd->count("--efficiency") && !cmd->count("--overlap")) {
        opts.supplied_efficiency = config->at("efficiency").get<double>();
    }
    return structure;
}

int run_indist(const IndistArgs& args, const CLI::App* cmd) {
    ScenarioOptions opts = args.scenario;
    std::string label;
    if (!args.preset.empty()) {
        label = apply_preset(cmd, args, opts);
    } else if (!cmd->count("--modes") || !cmd->count("--position") || !cmd->count("--purcell")) {
        throw UsageError("--modes, --position and --purcell are required (or use --preset)");
    }
    const auto catalog = load_catalog(opts.modes_path, label);
    const auto scenario = make_scenario(opts, catalog.structure_label(), false);
    const auto cfg = quadrature_config(opts.rel_tol);

    // echo the quadrature error estimate alongside the report
    const auto couplings =
        phonon::build_coupling_set(catalog, scenario.temperature, scenario.position);
    const auto indist = phonon::indistinguishability(couplings, scenario.gamma_cavity(), cfg);
    std::cerr << "quadrature error estimate: " << fmt_sci(indist.error_estimate) << '\n';

    const auto report = phonon::merit_report(scenario, catalog, cfg);
    if (args.output.format == "json") {
        json j = merit_to_json(report);
        j["command"] = "indist";
        j["quadrature_error_estimate"] = indist.error_estimate;
        if (!args.output.no_timestamp) j["generated"] = timestamp_utc();
        emit(args.output, json_dump(j));
    } else {
        std::ostringstream out;
        append_header_comment(out, "indist", args.output);
        merit_to_csv(out, report);
        emit(args.output, out.str());
    }
    return 0;
}

// -------------------------------------------------------------------- sweep

struct SweepArgs {
    ScenarioOptions scenario;
    std::string range;
    OutputOptions output;
};

int run_sweep(const SweepArgs& args) {
    const auto catalog = load_catalog(args.scenario.modes_path);
    const auto scenario = make_scenario(args.scenario, catalog.structure_label(), true);
    const auto cfg = quadrature_config(args.scenario.rel_tol);
    const Range range = parse_range(args.range);

    std::vector<phonon::Temperature> temperatures;
    for (const double t : range.points()) {
        temperatures.push_back(phonon::kelvin(t));
    }
    const auto points = phonon::temperature_sweep(scenario, catalog, temperatures, cfg);

    if (args.output.format == "json") {
        json j;
        j["command"] = "sweep";
        j["catalog"] = catalog.structure_label();
        j["position"] = position_name(scenario.position);
        j["purcell"] = scenario.purcell;
        if (!args.output.no_timestamp) j["generated"] = timestamp_utc();
        json series = json::array();
        for (const auto& p : points) {
            series.push_back({{"temperature_k", p.temperature.value()},
                              {"indistinguishability", p.indistinguishability}});
        }
        j["series"] = std::move(series);
        emit(args.output, json_dump(j));
    } else {
        std::ostringstream out;
        append_header_comment(out, "sweep", args.output);
        out << "# catalog: " << catalog.structure_label() << '\n';
        out << "# position: " << position_name(scenario.position) << '\n';
        out << "# purcell: " << fmt_sci(scenario.purcell) << '\n';
        out << "temperature_k,indistinguishability\n";
        for (const auto& p : points) {
            out << fmt_sci(p.temperature.value()) << ',' << fmt_sci(p.indistinguishability)
                << '\n';
        }
        emit(args.output, out.str());
    }
    return 0;
}

// ----------------------------------------------------------------- spectrum

struct SpectrumArgs {
    ScenarioOptions scenario;
    std::string range;  // detuning grid in MHz
    OutputOptions output;
};

int run_spectrum(const SpectrumArgs& args) {
    const auto catalog = load_catalog(args.scenario.modes_path);
    const auto position = parse_position(args.scenario.position);
    const auto cfg = quadrature_config(args.scenario.rel_tol);
    const Range range = parse_range(args.range);

    const auto couplings =
        phonon::build_coupling_set(catalog, phonon::kelvin(args.scenario.temperature), position);
    const phonon::Rate gamma =
        phonon::per_second(args.scenario.purcell * args.scenario.gamma_bulk_ghz * 1e9);

    std::vector<phonon::AngularFrequency> grid;
    for (const double f_mhz : range.points()) {
        grid.push_back(phonon::AngularFrequency{phonon::two_pi * f_mhz * 1e6});
    }
    const auto samples = phonon::spectrum(couplings, gamma, grid, cfg);

    if (args.output.format == "json") {
        json j;
        j["command"] = "spectrum";
        j["catalog"] = catalog.structure_label();
        j["temperature_k"] = args.scenario.temperature;
        j["position"] = position_name(position);
        j["gamma_per_s"] = gamma.value();
        if (!args.output.no_timestamp) j["generated"] = timestamp_utc();
        json series = json::array();
        for (const auto& s : samples) {
            series.push_back({{"detuning_mhz", s.detuning.value() / (phonon::two_pi * 1e6)},
                              {"s_value", s.s_value}});
        }
        j["series"] = std::move(series);
        emit(args.output, json_dump(j));
    } else {
        std::ostringstream out;
        append_header_comment(out, "spectrum", args.output);
        out << "# catalog: " << catalog.structure_label() << '\n';
        out << "# gamma_per_s: " << fmt_sci(gamma.value()) << '\n';
        out << "detuning_mhz,s_value\n";
        for (const auto& s : samples) {
            out << fmt_sci(s.detuning.value() / (phonon::two_pi * 1e6)) << ',' << fmt_sci(s.s_value)
                << '\n';
        }
        emit(args.output, out.str());
    }
    return 0;
}

// ------------------------------------------------------------------- table1

struct Table1Args {
    std::string presets_path;
    std::string modes_no_dbr;
    std::string modes_with_dbr;
    double rel_tol = 1e-8;
    OutputOptions output;
};

int run_table1(const Table1Args& args) {
    json presets;
    {
        auto in = open_input(args.presets_path);
        try {
            presets = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError(args.presets_path + ": " + e.what());
        }
    }
    const auto cfg = quadrature_config(args.rel_tol);
    const double gamma_bulk_hz = presets.at("gamma_bulk_hz").get<double>();
    const double temperature_k = presets.at("temperature_k").get<double>();

    const auto no_dbr = load_catalog(args.modes_no_dbr, "no_dbr");
    const auto with_dbr = load_catalog(args.modes_with_dbr, "with_dbr");

    std::vector<std::pair<std::string, phonon::MeritReport>> reports;
    for (const auto& entry : presets.at("configurations")) {
        const std::string label = entry.at("label").get<std::string>();
        const std::string structure = entry.at("structure").get<std::string>();
        const phonon::ModeCatalog* catalog = nullptr;
        if (structure == "no_dbr") {
            catalog = &no_dbr;
        } else if (structure == "with_dbr") {
            catalog = &with_dbr;
        } else {
            throw UsageError("preset " + label + ": unknown structure '" + structure + "'");
        }
        phonon::Scenario scenario;
        scenario.catalog_label = structure;
        scenario.temperature = phonon::kelvin(temperature_k);
        scenario.position = parse_position(entry.at("position").get<std::string>());
        scenario.purcell = entry.at("purcell").get<double>();
        scenario.gamma_bulk = phonon::per_second(gamma_bulk_hz);
        scenario.gamma_background =
            phonon::per_second(entry.at("gamma_b_rel").get<double>() * gamma_bulk_hz);
        scenario.efficiency = entry.at("efficiency").get<double>();
        try {
            scenario.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError("preset " + label + ": " + e.what());
        }
        reports.emplace_back(label, phonon::merit_report(scenario, *catalog, cfg));
    }

    if (args.output.format == "json") {
        json j;
        j["command"] = "table1";
        if (!args.output.no_timestamp) j["generated"] = timestamp_utc();
        json rows = json::array();
        for (const auto& [label, report] : reports) {
            json row = merit_to_json(report);
            row["label"] = label;
            rows.push_back(std::move(row));
        }
        j["configurations"] = std::move(rows);
        emit(args.output, json_dump(j));
    } else {
        std::ostringstream out;
        append_header_comment(out, "table1", args.output);
        out << "label,structure,position,purcell,efficiency,indistinguishability,product\n";
        for (const auto& [label, report] : reports) {
            out << label << ',' << report.scenario.catalog_label << ','
                << position_name(report.scenario.position) << ',' << fmt_sci(report.purcell)
                << ',' << fmt_sci(report.efficiency) << ','
                << fmt_sci(report.indistinguishability) << ',' << fmt_sci(report.product) << '\n';
        }
        emit(args.output, out.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phonon dephasing engine for quantum-dot single-photon sources"};
    app.require_subcommand(1);

    CouplingsArgs couplings_args;
    auto* cmd_couplings = app.add_subcommand(
        "couplings", "per-mode coupling parameters (eta_sq, theta_sq, occupation)");
    cmd_couplings->add_option("--modes", couplings_args.modes_path, "mode catalog CSV")
        ->required();
    cmd_couplings->add_option("--temperature", couplings_args.temperature, "bath temperature [K]")
        ->capture_default_str();
    cmd_couplings
        ->add_option("--position", couplings_args.position,
                     "emitter position: axis|sidewall (sidewall shows the flexural maxima)")
        ->capture_default_str();
    add_output_options(cmd_couplings, couplings_args.output);

    ValidateArgs validate_args;
    auto* cmd_validate =
        app.add_subcommand("validate", "cross-check computed couplings against a reference table");
    cmd_validate->add_option("--modes", validate_args.modes_path, "mode catalog CSV")->required();
    cmd_validate->add_option("--reference", validate_args.reference_path,
                             "reference coupling CSV")
        ->required();
    cmd_validate->add_option("--temperature", validate_args.temperature, "bath temperature [K]")
        ->capture_default_str();
    cmd_validate->add_option("--tolerance", validate_args.tolerance, "relative tolerance")
        ->capture_default_str();
    add_output_options(cmd_validate, validate_args.output);

    IndistArgs indist_args;
    indist_args.presets_path = fixtures_dir() + "/table1_presets.json";
    auto* cmd_indist =
        app.add_subcommand("indist", "single-scenario figures of merit (indistinguishability)");
    add_scenario_options(cmd_indist, indist_args.scenario, true, false);
    cmd_indist->add_option("--preset", indist_args.preset,
                           "preset configuration label (a-d or table1-a..table1-d)");
    cmd_indist->add_option("--presets", indist_args.presets_path, "scenario preset JSON")
        ->capture_default_str();
    add_output_options(cmd_indist, indist_args.output);

    SweepArgs sweep_args;
    auto* cmd_sweep = app.add_subcommand("sweep", "indistinguishability vs temperature");
    add_scenario_options(cmd_sweep, sweep_args.scenario, true);
    cmd_sweep->add_option("--range", sweep_args.range, "temperature range start:stop:count [K]")
        ->required();
    add_output_options(cmd_sweep, sweep_args.output);

    SpectrumArgs spectrum_args;
    auto* cmd_spectrum = app.add_subcommand("spectrum", "emission spectrum on a detuning grid");
    add_scenario_options(cmd_spectrum, spectrum_args.scenario, false);
    cmd_spectrum
        ->add_option("--range", spectrum_args.range, "detuning range start:stop:count [MHz]")
        ->required();
    add_output_options(cmd_spectrum, spectrum_args.output);

    Table1Args table1_args;
    table1_args.presets_path = fixtures_dir() + "/table1_presets.json";
    table1_args.modes_no_dbr = fixtures_dir() + "/modes_no_dbr.csv";
    table1_args.modes_with_dbr = fixtures_dir() + "/modes_with_dbr.csv";
    auto* cmd_table1 =
        app.add_subcommand("table1", "figures of merit for the four preset configurations");
    cmd_table1->add_option("--presets", table1_args.presets_path, "scenario preset JSON")
        ->capture_default_str();
    cmd_table1->add_option("--modes-no-dbr", table1_args.modes_no_dbr, "no-DBR catalog CSV")
        ->capture_default_str();
    cmd_table1->add_option("--modes-with-dbr", table1_args.modes_with_dbr, "with-DBR catalog CSV")
        ->capture_default_str();
    cmd_table1->add_option("--rel-tol", table1_args.rel_tol, "quadrature relative tolerance")
        ->capture_default_str();
    add_output_options(cmd_table1, table1_args.output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*cmd_couplings) return run_couplings(couplings_args);
        if (*cmd_validate) return run_validate(validate_args);
        if (*cmd_indist) return run_indist(indist_args, cmd_indist);
        if (*cmd_sweep) return run_sweep(sweep_args);
        if (*cmd_spectrum) return run_spectrum(spectrum_args);
        if (*cmd_table1) return run_table1(table1_args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const phonon::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "computation failed: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
