#include "parannot/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "parannot/agreement.hpp"
#include "parannot/codec.hpp"
#include "parannot/guideline.hpp"
#include "parannot/store.hpp"

namespace parannot {

namespace {

using ojson = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CorpusFormat input_format(const std::string& path, const std::string& requested) {
    if (!requested.empty()) {
        const auto f = parse_format(requested);
        if (!f) throw UsageError("unknown input format " + requested);
        return *f;
    }
    const auto ext = std::filesystem::path(path).extension().string();
    return ext == ".tsv" ? CorpusFormat::Tsv : CorpusFormat::Jsonl;
}

ojson diagnostic_json(const Diagnostic& d) {
    ojson j;
    j["line"] = d.line;
    j["field"] = d.field;
    j["code"] = to_string(d.code);
    j["severity"] = d.warning ? "warning" : "error";
    j["message"] = d.message;
    return j;
}

void print_diagnostics(const std::vector<Diagnostic>& diags, bool jsonl, std::ostream& out) {
    for (const auto& d : diags) {
        if (jsonl) {
            out << diagnostic_json(d).dump() << '\n';
        } else {
            out << format_diagnostic(d) << '\n';
        }
    }
}

std::vector<CorpusRecord> valid_records(const CorpusCheck& check) {
    std::vector<CorpusRecord> out;
    for (const auto& r : check.records) {
        if (r.record) out.push_back(*r.record);
    }
    return out;
}

struct Common {
    std::string format = "text";
    std::string input_format;

    bool jsonl() const { return format == "jsonl"; }
};

void add_output_format(CLI::App* cmd, Common& c) {
    cmd->add_option("--format", c.format, "Output: text or jsonl")->check(CLI::IsMember({"text", "jsonl"}));
}

// --- validate ---------------------------------------------------------------

int cmd_validate(const std::vector<std::string>& paths, bool strict, const Common& c, std::ostream& out) {
    bool ok = true;
    for (const auto& path : paths) {
        const auto data = read_file(path);
        const auto check = check_corpus(data, input_format(path, c.input_format));
        const bool file_ok = check.ok(strict);
        ok = ok && file_ok;
        const std::size_t records = check.records.size();
        if (c.jsonl()) {
            for (const auto& d : check.diagnostics) {
                auto j = diagnostic_json(d);
                j["file"] = path;
                out << j.dump() << '\n';
            }
            ojson s;
            s["file"] = path;
            s["records"] = records;
            s["errors"] = check.error_count;
            s["warnings"] = check.warning_count;
            s["ok"] = file_ok;
            out << ojson{{"summary", s}}.dump() << '\n';
        } else {
            for (const auto& d : check.diagnostics) out << path << ": " << format_diagnostic(d) << '\n';
            out << path << ": " << records << " records, " << check.error_count << " errors, " << check.warning_count
                << " warnings" << (file_ok ? "" : " (invalid)") << '\n';
        }
    }
    return ok ? kExitOk : kExitInvalid;
}

// --- stats ------------------------------------------------------------------

constexpr std::array<char, 4> kFlagChars{'<', '>', 's', 'i'};

std::array<bool, 4> flag_bits(const AnnotatedLabel& l) {
    const auto& f = l.flags();
    return {f.direction == Direction::FormerMoreGeneral, f.direction == Direction::LatterMoreGeneral, f.style,
            f.minor_deviation};
}

int cmd_stats(const std::string& path, const Common& c, std::ostream& out, std::ostream& err) {
    const auto data = read_file(path);
    const auto check = check_corpus(data, input_format(path, c.input_format));
    if (!check.ok(false)) {
        print_diagnostics(check.diagnostics, c.jsonl(), err);
        return kExitInvalid;
    }
    const auto records = valid_records(check);
    if (records.empty()) err << "warning: " << path << " holds no records\n";

    std::array<std::size_t, kLabelCount> per_label{};
    std::map<char, std::size_t> per_base;
    for (auto b : {'1', '2', '3', '4', 'x'}) per_base[b] = 0;
    std::array<std::size_t, 4> per_flag{};
    std::array<std::array<std::size_t, 4>, 4> co{};
    std::size_t rewrites = 0;
    for (const auto& r : records) {
        ++per_label[r.label->index()];
        ++per_base[base_char(r.label->base())];
        const auto bits = flag_bits(*r.label);
        for (std::size_t i = 0; i < 4; ++i) {
            if (!bits[i]) continue;
            ++per_flag[i];
            for (std::size_t j = i + 1; j < 4; ++j) co[i][j] += bits[j];
        }
        rewrites += r.rewrites.size();
    }

    const auto total = records.size();
    const auto frac = [&](std::size_t n) { return total ? static_cast<double>(n) / static_cast<double>(total) : 0.0; };
    const auto& labels = all_labels();

    if (c.jsonl()) {
        for (std::size_t i = 0; i < kLabelCount; ++i) {
            out << ojson{{"label", format_label(labels[i])}, {"count", per_label[i]}, {"fraction", frac(per_label[i])}}
                       .dump()
                << '\n';
        }
        for (const auto& [b, n] : per_base) {
            out << ojson{{"base", std::string(1, b)}, {"count", n}, {"fraction", frac(n)}}.dump() << '\n';
        }
        for (std::size_t i = 0; i < 4; ++i) {
            out << ojson{{"flag", std::string(1, kFlagChars[i])}, {"count", per_flag[i]}}.dump() << '\n';
        }
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = i + 1; j < 4; ++j) {
                out << ojson{{"flags", std::string{kFlagChars[i], kFlagChars[j]}}, {"count", co[i][j]}}.dump()
                    << '\n';
            }
        }
        out << ojson{{"total", total}, {"rewrites", rewrites}}.dump() << '\n';
        return kExitOk;
    }

    out << std::fixed << std::setprecision(4);
    out << "label     count  fraction\n";
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        out << std::left << std::setw(8) << format_label(labels[i]) << std::right << std::setw(7) << per_label[i]
            << std::setw(10) << frac(per_label[i]) << '\n';
    }
    out << "\nbase      count  fraction\n";
    for (const auto& [b, n] : per_base) {
        out << std::left << std::setw(8) << b << std::right << std::setw(7) << n << std::setw(10) << frac(n) << '\n';
    }
    out << "\nflag      count\n";
    for (std::size_t i = 0; i < 4; ++i) {
        out << std::left << std::setw(8) << kFlagChars[i] << std::right << std::setw(7) << per_flag[i] << '\n';
    }
    out << "\nco-occurrence\n" << std::setw(4) << "";
    for (auto f : kFlagChars) out << std::setw(6) << f;
    out << '\n';
    for (std::size_t i = 0; i < 4; ++i) {
        out << std::left << std::setw(4) << kFlagChars[i] << std::right;
        for (std::size_t j = 0; j < 4; ++j) {
            const auto n = i == j ? per_flag[i] : co[std::min(i, j)][std::max(i, j)];
            out << std::setw(6) << n;
        }
        out << '\n';
    }
    out << "\ntotal " << total << " records, " << rewrites << " rewrites\n";
    return kExitOk;
}

// --- agreement --------------------------------------------------------------

// First label per pair id, in file order.
std::vector<std::pair<std::string, AnnotatedLabel>> labels_by_id(const std::string& path, const Common& c,
                                                                 std::ostream& err, bool& ok) {
    const auto check = check_corpus(read_file(path), input_format(path, c.input_format));
    if (!check.ok(false)) {
        for (const auto& d : check.diagnostics) err << path << ": " << format_diagnostic(d) << '\n';
        ok = false;
        return {};
    }
    std::vector<std::pair<std::string, AnnotatedLabel>> out;
    std::map<std::string, bool, std::less<>> seen;
    for (const auto& r : valid_records(check)) {
        if (seen.count(r.id)) {
            err << path << ": warning: pair " << r.id << " labeled more than once; using the first record\n";
            continue;
        }
        seen[r.id] = true;
        out.emplace_back(r.id, *r.label);
    }
    return out;
}

int cmd_agreement(const std::string& path_a, const std::string& path_b, const Common& c, std::ostream& out,
                  std::ostream& err) {
    bool ok = true;
    const auto a = labels_by_id(path_a, c, err, ok);
    const auto b = labels_by_id(path_b, c, err, ok);
    if (!ok) return kExitInvalid;

    std::map<std::string, AnnotatedLabel, std::less<>> b_map(b.begin(), b.end());
    std::vector<LabelPair> items;
    std::size_t only_a = 0;
    for (const auto& [id, label] : a) {
        const auto it = b_map.find(id);
        if (it == b_map.end()) {
            ++only_a;
            continue;
        }
        items.emplace_back(label, it->second);
    }
    const std::size_t only_b = b.size() - items.size();
    if (only_a || only_b) {
        err << "warning: " << only_a << " ids only in " << path_a << ", " << only_b << " ids only in " << path_b
            << '\n';
    }
    if (items.empty()) {
        err << "NoOverlap: the files share no pair id\n";
        return kExitInvalid;
    }
    try {
        const auto report = compute_agreement(items);
        out << (c.jsonl() ? report_to_json(report) + "\n" : render_report(report));
    } catch (const AgreementError& e) {
        err << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitOk;
}

// --- lint -------------------------------------------------------------------

void print_findings(std::string_view where, const std::vector<LintFinding>& findings, bool jsonl, std::ostream& out) {
    for (const auto& f : findings) {
        if (jsonl) {
            out << ojson{{"id", where}, {"kind", to_string(f.kind)}, {"detail", f.detail}}.dump() << '\n';
        } else {
            out << where << ": " << to_string(f.kind) << ": " << f.detail << '\n';
        }
    }
}

int cmd_lint(const std::string& path, const std::optional<std::string>& text1, const std::optional<std::string>& text2,
             const Common& c, std::ostream& out, std::ostream& err) {
    if (text1 || text2) {
        if (!text1 || !text2 || !path.empty()) throw UsageError("lint takes a file or both --text1 and --text2");
        print_findings("pair", lint_pair(*text1, *text2), c.jsonl(), out);
        return kExitOk;
    }
    if (path.empty()) throw UsageError("lint takes a file or both --text1 and --text2");
    DecodeOptions options;
    options.allow_unlabeled = true;
    const auto check = check_corpus(read_file(path), input_format(path, c.input_format), options);
    if (!check.ok(false)) {
        for (const auto& d : check.diagnostics) err << path << ": " << format_diagnostic(d) << '\n';
        return kExitInvalid;
    }
    std::size_t flagged = 0;
    for (const auto& r : valid_records(check)) {
        const auto findings = lint_pair(r.text1, r.text2);
        flagged += !findings.empty();
        print_findings(r.id, findings, c.jsonl(), out);
    }
    if (!c.jsonl()) out << flagged << " pairs with findings\n";
    return kExitOk;
}

// --- import / export --------------------------------------------------------

int cmd_import(const std::string& store_dir, const std::string& path, bool lenient, bool candidates,
               const std::optional<std::string>& batch, int required, const Common& c, std::ostream& out,
               std::ostream& err) {
    Store store{std::filesystem::path(store_dir)};
    ImportOptions options;
    options.strict = !lenient;
    options.allow_unlabeled = candidates;
    options.batch_id = batch;
    options.required_annotators = required;
    ImportReport report;
    try {
        report = store.import_corpus(read_file(path), input_format(path, c.input_format), options);
    } catch (const CorpusError& e) {
        err << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitInvalid;
    }
    print_diagnostics(report.diagnostics, c.jsonl(), err);
    if (c.jsonl()) {
        out << ojson{{"records", report.records},
                     {"pairs_created", report.pairs_created},
                     {"annotations_recorded", report.annotations_recorded},
                     {"skipped", report.skipped},
                     {"applied", report.applied}}
                   .dump()
            << '\n';
    } else {
        out << (report.applied ? "imported " : "rejected ") << report.records << " records: " << report.pairs_created
            << " new pairs, " << report.annotations_recorded << " annotations, " << report.skipped << " skipped\n";
    }
    return report.applied ? kExitOk : kExitInvalid;
}

int cmd_export(const std::string& store_dir, const std::optional<std::string>& batch, const std::string& format_name,
               const std::string& output, std::ostream& out, std::ostream& err) {
    if (!std::filesystem::is_directory(store_dir)) throw UsageError("no store at " + store_dir);
    const auto format = parse_format(format_name);
    if (!format) throw UsageError("unknown corpus format " + format_name);
    Store store{std::filesystem::path(store_dir)};
    std::string data;
    try {
        data = store.export_corpus(ExportScope{batch}, *format);
    } catch (const CorpusError& e) {
        err << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitInvalid;
    }
    if (output.empty() || output == "-") {
        out << data;
        return kExitOk;
    }
    std::ofstream file(output, std::ios::binary);
    if (!file || !(file << data)) throw UsageError("cannot write " + output);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Paraphrase corpus annotation toolbox", "parannot"};
    app.require_subcommand(1);

    Common common;

    std::vector<std::string> validate_paths;
    bool strict = false;
    auto* validate = app.add_subcommand("validate", "Check corpus files against the schema and label rules");
    validate->add_option("files", validate_paths, "Corpus files")->required();
    validate->add_flag("--strict", strict, "Treat warnings as failures");
    validate->add_option("--input-format", common.input_format, "jsonl or tsv (default: by extension)");
    add_output_format(validate, common);

    std::string stats_path;
    auto* stats = app.add_subcommand("stats", "Label, base and flag counts");
    stats->add_option("file", stats_path, "Corpus file")->required();
    stats->add_option("--input-format", common.input_format, "jsonl or tsv (default: by extension)");
    add_output_format(stats, common);

    std::string path_a, path_b;
    auto* agreement = app.add_subcommand("agreement", "Agreement between two annotators' files");
    agreement->add_option("first", path_a, "First annotator's file")->required();
    agreement->add_option("second", path_b, "Second annotator's file")->required();
    agreement->add_option("--input-format", common.input_format, "jsonl or tsv (default: by extension)");
    add_output_format(agreement, common);

    std::string lint_path;
    std::optional<std::string> text1, text2;
    auto* lint = app.add_subcommand("lint", "Flag identical and near-identical pairs");
    lint->add_option("file", lint_path, "Corpus or candidate file");
    lint->add_option("--text1", text1, "First text of a single pair");
    lint->add_option("--text2", text2, "Second text of a single pair");
    lint->add_option("--input-format", common.input_format, "jsonl or tsv (default: by extension)");
    add_output_format(lint, common);

    std::string import_store, import_path;
    bool lenient = false;
    bool candidates = false;
    std::optional<std::string> import_batch;
    int required = 1;
    auto* import = app.add_subcommand("import", "Load a corpus file into a store directory");
    import->add_option("file", import_path, "Corpus file")->required();
    import->add_option("--store", import_store, "Store directory")->required();
    import->add_flag("--lenient", lenient, "Skip bad records instead of rejecting the file");
    import->add_flag("--candidates", candidates, "Accept unlabeled candidate records");
    import->add_option("--batch", import_batch, "Collect the imported pairs into this batch");
    import->add_option("--annotators", required, "Annotators required per pair in the batch")
        ->check(CLI::Range(1, 16));
    import->add_option("--input-format", common.input_format, "jsonl or tsv (default: by extension)");
    add_output_format(import, common);

    std::string export_store, export_format = "jsonl", output;
    std::optional<std::string> export_batch;
    auto* exp = app.add_subcommand("export", "Write a store's annotations as a corpus file");
    exp->add_option("--store", export_store, "Store directory")->required();
    exp->add_option("--batch", export_batch, "Only this batch, in batch order");
    exp->add_option("--format", export_format, "jsonl or tsv")->check(CLI::IsMember({"jsonl", "tsv"}));
    exp->add_option("-o,--output", output, "Output file (default: stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        for (auto* sub : app.get_subcommands()) err << sub->help();
        if (app.get_subcommands().empty()) err << app.help();
        return kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(validate_paths, strict, common, out);
        if (stats->parsed()) return cmd_stats(stats_path, common, out, err);
        if (agreement->parsed()) return cmd_agreement(path_a, path_b, common, out, err);
        if (lint->parsed()) return cmd_lint(lint_path, text1, text2, common, out, err);
        if (import->parsed()) {
            return cmd_import(import_store, import_path, lenient, candidates, import_batch, required, common, out,
                              err);
        }
        if (exp->parsed()) return cmd_export(export_store, export_batch, export_format, output, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace parannot
