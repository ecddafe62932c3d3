#include "oneclock/io.hpp"

#include "oneclock/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace oneclock {

std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

double parse_double(const std::string& text, const std::string& where) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw std::runtime_error(where + ": bad number '" + text + "'");
    return value;
}

long parse_long(const std::string& text, const std::string& where) {
    char* end = nullptr;
    const long value = std::strtol(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0')
        throw std::runtime_error(where + ": bad integer '" + text + "'");
    return value;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    parts.push_back(current);
    return parts;
}

// All writers assemble the full content and publish it with a rename, so a
// concurrently running command never observes a half-written file.
void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path staging = path.string() + ".tmp";
    {
        std::ofstream out(staging);
        if (!out)
            throw std::runtime_error("cannot write " + staging.string());
        out << content;
        if (!out)
            throw std::runtime_error("write failed for " + staging.string());
    }
    std::filesystem::rename(staging, path);
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    return in;
}

// Flat `key = value` file representation shared by manifests and records.
std::map<std::string, std::string> read_kv_file(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::map<std::string, std::string> kv;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": empty key");
        if (!kv.emplace(key, value).second)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": duplicate key '" + key + "'");
    }
    return kv;
}

class KvView {
public:
    KvView(std::map<std::string, std::string> kv, std::string source)
        : kv_(std::move(kv)), source_(std::move(source)) {}

    const std::string& require(const std::string& key) const {
        const auto it = kv_.find(key);
        if (it == kv_.end())
            throw std::runtime_error(source_ + ": missing key '" + key + "'");
        return it->second;
    }
    const std::string* get(const std::string& key) const {
        const auto it = kv_.find(key);
        return it == kv_.end() ? nullptr : &it->second;
    }
    double number(const std::string& key) const {
        return parse_double(require(key), source_ + " " + key);
    }
    long integer(const std::string& key) const {
        return parse_long(require(key), source_ + " " + key);
    }
    const std::string& source() const { return source_; }

private:
    std::map<std::string, std::string> kv_;
    std::string source_;
};

} // namespace

void write_runlog_csv(const RunLog& log, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "# experiment=" << log.experiment_id << " beta=" << format_full(log.beta)
        << " seed=" << log.seed << " total_steps=" << log.total_steps;
    if (log.diverged) out << " diverged=1";
    out << "\n";
    out << "step,split,loss\n";
    for (const auto& r : log.records)
        out << r.step << ',' << (r.split == Split::train ? "train" : "val") << ','
            << format_full(r.loss) << "\n";
    write_atomic(path, out.str());
}

RunLog read_runlog_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    RunLog log;
    std::string line;
    long line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        if (stripped[0] == '#') {
            std::istringstream meta(stripped.substr(1));
            std::string token;
            while (meta >> token) {
                const auto eq = token.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = token.substr(0, eq);
                const std::string value = token.substr(eq + 1);
                if (key == "experiment") log.experiment_id = value;
                else if (key == "beta") log.beta = parse_double(value, where);
                else if (key == "seed")
                    log.seed = static_cast<std::uint64_t>(parse_long(value, where));
                else if (key == "total_steps") log.total_steps = parse_long(value, where);
                else if (key == "diverged") log.diverged = value == "1";
            }
            continue;
        }
        if (!saw_header) {
            if (stripped != "step,split,loss")
                throw std::runtime_error(where + ": expected header 'step,split,loss'");
            saw_header = true;
            continue;
        }
        const auto fields = split(stripped, ',');
        if (fields.size() != 3)
            throw std::runtime_error(where + ": expected 3 fields");
        RunRecord record;
        record.step = parse_long(trim(fields[0]), where);
        const std::string split_name = trim(fields[1]);
        if (split_name == "train") record.split = Split::train;
        else if (split_name == "val") record.split = Split::val;
        else throw std::runtime_error(where + ": split must be train or val");
        record.loss = parse_double(trim(fields[2]), where);
        log.records.push_back(record);
    }
    if (!saw_header)
        throw std::runtime_error(path.string() + ": empty run log");
    return log;
}

void write_record(const ExperimentRecord& record, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "record.experiment_id = " << record.experiment_id << "\n";
    out << "record.split = " << to_string(record.split) << "\n";
    out << "record.budget = " << record.budget << "\n";
    out << "record.t_es = " << record.t_es << "\n";
    out << "record.n_beta = " << record.entries.size() << "\n";
    for (std::size_t i = 0; i < record.entries.size(); ++i) {
        const auto& entry = record.entries[i];
        const std::string prefix = "beta." + std::to_string(i);
        out << prefix << ".value = " << format_full(entry.beta) << "\n";
        out << prefix << ".loss = " << format_full(entry.loss) << "\n";
        out << prefix << ".stop_step = " << entry.stop_step << "\n";
        out << prefix << ".seeds_used = " << entry.seeds_used << "\n";
        std::string minima;
        for (double v : entry.seed_min_losses) {
            if (!minima.empty()) minima += ',';
            minima += format_full(v);
        }
        out << prefix << ".seed_min_losses = " << minima << "\n";
        std::string curve;
        for (const auto& p : entry.curve.points) {
            if (!curve.empty()) curve += ',';
            curve += std::to_string(p.step) + ':' + format_full(p.val_loss);
        }
        out << prefix << ".curve = " << curve << "\n";
    }
    write_atomic(path, out.str());
}

ExperimentRecord read_record(const std::filesystem::path& path) {
    const KvView kv(read_kv_file(path), path.string());
    ExperimentRecord record;
    record.experiment_id = kv.require("record.experiment_id");
    record.split = split_tag_from_string(kv.require("record.split"));
    record.budget = kv.integer("record.budget");
    record.t_es = kv.integer("record.t_es");
    const long n = kv.integer("record.n_beta");
    for (long i = 0; i < n; ++i) {
        const std::string prefix = "beta." + std::to_string(i);
        ExperimentRecord::BetaEntry entry;
        entry.beta = kv.number(prefix + ".value");
        entry.loss = kv.number(prefix + ".loss");
        entry.stop_step = kv.integer(prefix + ".stop_step");
        entry.seeds_used = static_cast<int>(kv.integer(prefix + ".seeds_used"));
        const std::string minima = kv.require(prefix + ".seed_min_losses");
        if (!minima.empty())
            for (const auto& part : split(minima, ','))
                entry.seed_min_losses.push_back(
                    parse_double(trim(part), kv.source() + " " + prefix));
        const std::string curve = kv.require(prefix + ".curve");
        entry.curve.budget = record.budget;
        if (!curve.empty()) {
            for (const auto& part : split(curve, ',')) {
                const auto colon = part.find(':');
                if (colon == std::string::npos)
                    throw std::runtime_error(kv.source() + ": bad curve point '" + part + "'");
                ValCurve::Point point;
                point.step = parse_long(trim(part.substr(0, colon)), kv.source());
                point.val_loss = parse_double(trim(part.substr(colon + 1)), kv.source());
                entry.curve.points.push_back(point);
            }
        }
        record.entries.push_back(std::move(entry));
    }
    std::stable_sort(record.entries.begin(), record.entries.end(),
                     [](const auto& a, const auto& b) { return a.beta < b.beta; });
    return record;
}

std::vector<ExperimentRecord> read_records(const std::vector<std::string>& paths) {
    std::vector<ExperimentRecord> records;
    for (const auto& p : paths) records.push_back(read_record(p));
    return records;
}

ExperimentManifest read_manifest(const std::filesystem::path& path) {
    const KvView kv(read_kv_file(path), path.string());
    ExperimentManifest manifest;
    manifest.experiment_id = kv.require("experiment.id");
    manifest.split = split_tag_from_string(kv.require("experiment.split"));

    manifest.task.kind = task_kind_from_string(kv.require("task.kind"));
    manifest.task.dim = kv.integer("task.dim");
    if (kv.get("task.hidden")) manifest.task.hidden = kv.integer("task.hidden");
    manifest.task.data_seed = static_cast<std::uint64_t>(kv.integer("task.data_seed"));
    if (kv.get("task.noise_scale")) manifest.task.noise_scale = kv.number("task.noise_scale");
    manifest.task.train_samples = kv.integer("task.train_samples");
    manifest.task.val_samples = kv.integer("task.val_samples");
    manifest.task.batch_size = kv.integer("task.batch_size");

    if (kv.get("optimizer.epsilon")) manifest.optimizer.epsilon = kv.number("optimizer.epsilon");
    if (kv.get("optimizer.weight_decay"))
        manifest.optimizer.weight_decay = kv.number("optimizer.weight_decay");
    if (const auto* mode = kv.get("optimizer.decay_mode")) {
        if (*mode == "coupled") manifest.optimizer.decay_mode = DecayMode::coupled;
        else if (*mode == "decoupled") manifest.optimizer.decay_mode = DecayMode::decoupled;
        else throw std::runtime_error(kv.source() + ": decay_mode must be coupled or decoupled");
    }
    if (kv.get("optimizer.clip_norm"))
        manifest.optimizer.clip_norm = kv.number("optimizer.clip_norm");

    manifest.lr_max = kv.number("schedule.lr_max");
    manifest.lr_min = kv.number("schedule.lr_min");
    manifest.warmup_steps = kv.integer("schedule.warmup_steps");
    manifest.total_steps = kv.integer("run.total_steps");
    manifest.eval_every = kv.integer("run.eval_every");

    manifest.seeds.clear();
    for (const auto& part : split(kv.require("run.seeds"), ','))
        manifest.seeds.push_back(static_cast<std::uint64_t>(
            parse_long(trim(part), kv.source() + " run.seeds")));

    validate(manifest);
    return manifest;
}

ExperimentRecord import_curves(const std::filesystem::path& path,
                               const ImportOptions& options) {
    if (options.experiment_id.empty())
        throw std::invalid_argument("import_curves: experiment id required");
    std::ifstream in = open_in(path);

    std::string line;
    long line_no = 0;
    bool has_split_column = false;
    bool saw_header = false;
    std::map<double, std::vector<ValCurve::Point>> curves;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        if (!saw_header) {
            if (stripped == "beta,step,split,loss") has_split_column = true;
            else if (stripped == "beta,step,loss") has_split_column = false;
            else
                throw std::runtime_error(
                    where + ": expected header 'beta,step,split,loss' or 'beta,step,loss'");
            saw_header = true;
            continue;
        }
        const auto fields = split(stripped, ',');
        const std::size_t expected = has_split_column ? 4 : 3;
        if (fields.size() != expected)
            throw std::runtime_error(where + ": expected " + std::to_string(expected) +
                                     " fields");
        const double beta = parse_double(trim(fields[0]), where);
        if (!(beta >= 0.0 && beta < 1.0))
            throw std::runtime_error(where + ": beta must be in [0, 1)");
        const long step = parse_long(trim(fields[1]), where);
        if (has_split_column) {
            const std::string split_name = trim(fields[2]);
            if (split_name == "train") continue;  // only validation rows matter
            if (split_name != "val")
                throw std::runtime_error(where + ": split must be train or val");
        }
        const double loss = parse_double(trim(fields[has_split_column ? 3 : 2]), where);
        if (!std::isfinite(loss))
            throw std::runtime_error(where + ": non-finite loss");
        curves[beta].push_back({step, loss});
    }
    if (!saw_header)
        throw std::runtime_error(path.string() + ": empty input");
    if (curves.empty())
        throw std::runtime_error(path.string() + ": no validation rows");

    long budget = options.total_steps;
    if (budget == 0)
        for (const auto& [beta, points] : curves)
            for (const auto& p : points) budget = std::max(budget, p.step);
    if (budget < 1)
        throw std::runtime_error(path.string() + ": cannot determine total steps");

    ExperimentRecord record;
    record.experiment_id = options.experiment_id;
    record.split = options.split;
    record.budget = budget;
    for (auto& [beta, points] : curves) {
        std::sort(points.begin(), points.end(),
                  [](const auto& a, const auto& b) { return a.step < b.step; });
        for (std::size_t i = 1; i < points.size(); ++i)
            if (points[i].step == points[i - 1].step)
                throw std::runtime_error(path.string() + ": duplicate step " +
                                         std::to_string(points[i].step) + " for beta " +
                                         format_full(beta));
        if (points.back().step != budget)
            throw std::runtime_error(path.string() + ": beta " + format_full(beta) +
                                     " has no validation record at the final step " +
                                     std::to_string(budget));
        ExperimentRecord::BetaEntry entry;
        entry.beta = beta;
        entry.curve.points = points;
        entry.curve.budget = budget;
        entry.loss = std::numeric_limits<double>::infinity();
        for (const auto& p : points) entry.loss = std::min(entry.loss, p.val_loss);
        entry.seeds_used = 1;
        entry.seed_min_losses = {entry.loss};
        const long patience = std::max<long>(
            1, std::llround(options.patience_fraction * static_cast<double>(budget)));
        entry.stop_step = early_stop_step(entry.curve, patience, options.min_delta);
        record.entries.push_back(std::move(entry));
    }
    record.t_es = estimate_t_es(record, options.patience_fraction, options.min_delta);
    return record;
}

} // namespace oneclock
