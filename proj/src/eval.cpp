#include "codegenlink/eval.hpp"

#include "codegenlink/errors.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace codegenlink {

LabelSet LabelSet::parse(std::string_view text) {
    LabelSet set;
    std::size_t line_no = 0;
    for (std::string_view raw : text::split_lines(text)) {
        ++line_no;
        const std::string_view line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = text::split(line, '\t');
        if (fields.size() != 3) {
            throw Error(ErrorCode::ParseError, "labels line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
        }
        const std::string_view value = text::trim(fields[2]);
        Relevance relevance;
        if (text::iequals(value, "relevant")) {
            relevance = Relevance::HighlyRelevant;
        } else if (text::iequals(value, "irrelevant")) {
            relevance = Relevance::NotRelevant;
        } else {
            throw Error(ErrorCode::ParseError, "labels line " + std::to_string(line_no) + ": unknown label '" +
                                                   std::string(value) + "'");
        }
        const std::string task(text::trim(fields[0]));
        const std::string url(text::trim(fields[1]));
        if (const auto existing = set.find(task, url); existing && *existing != relevance) {
            throw Error(ErrorCode::ParseError, "labels line " + std::to_string(line_no) + ": conflicting label for " + url);
        }
        set.set(task, url, relevance);
    }
    return set;
}

LabelSet LabelSet::load(const std::filesystem::path& path) { return parse(text::read_file(path.string())); }

void LabelSet::set(const std::string& task_id, const std::string& url, Relevance relevance) {
    labels_[{task_id, url}] = relevance;
}

std::optional<Relevance> LabelSet::find(const std::string& task_id, const std::string& url) const {
    const auto it = labels_.find({task_id, url});
    if (it == labels_.end()) return std::nullopt;
    return it->second;
}

std::vector<EvalTask> load_eval_tasks(const std::filesystem::path& corpus_dir) {
    const auto dir = corpus_dir / "tasks";
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::IoError, "missing task directory " + dir.string());
    std::vector<EvalTask> tasks;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const Language language = language_from_path(entry.path());
        if (language == Language::Unknown) continue;
        EvalTask task;
        task.task_id = entry.path().stem().string();
        task.query.content = text::read_file(entry.path().string());
        task.query.language = language;
        tasks.push_back(std::move(task));
    }
    std::sort(tasks.begin(), tasks.end(), [](const auto& a, const auto& b) { return a.task_id < b.task_id; });
    for (std::size_t i = 1; i < tasks.size(); ++i) {
        if (tasks[i].task_id == tasks[i - 1].task_id) throw Error(ErrorCode::ParseError, "duplicate task id " + tasks[i].task_id);
    }
    return tasks;
}

namespace {

double parse_number(std::string_view s) {
    s = text::trim(s);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error(ErrorCode::ParseError, "bad number '" + std::string(s) + "'");
    return value;
}

}  // namespace

std::vector<double> parse_sweep(std::string_view spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string_view::npos) {
        const auto parts = text::split(spec, ':');
        if (parts.size() != 3) throw Error(ErrorCode::ParseError, "sweep range must be start:stop:step");
        const double start = parse_number(parts[0]);
        const double stop = parse_number(parts[1]);
        const double step = parse_number(parts[2]);
        if (step <= 0.0 || stop < start) throw Error(ErrorCode::ParseError, "empty sweep range");
        // Integer step count avoids accumulating 0.1 + 0.1 + ... drift; values
        // are rounded to 1e-9 so 0.7 prints and compares as 0.7.
        const auto steps = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= steps; ++i) out.push_back(std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9);
    } else {
        for (std::string_view part : text::split(spec, ',')) out.push_back(parse_number(part));
    }
    if (out.empty()) throw Error(ErrorCode::ParseError, "empty sweep");
    for (double t : out) {
        if (t < 0.0 || t > 1.0) throw Error(ErrorCode::ParseError, "sweep thresholds must lie in [0,1]");
    }
    return out;
}

const PrecisionCell* PrecisionTable::find(std::string_view row, double threshold) const {
    for (const PrecisionCell& cell : cells) {
        if (cell.row == row && std::abs(cell.threshold - threshold) < 1e-9) return &cell;
    }
    return nullptr;
}

PrecisionTable evaluate(const std::vector<EvalTask>& tasks, const LabelSet& labels, const AnalysisConfig& base,
                        const PipelineServices& services, const EvalOptions& options) {
    struct Row {
        std::string name;
        std::vector<Metric> metrics;
    };
    std::vector<Row> rows{{"clone", {Metric::Clone}}, {"cosine", {Metric::Cosine}}};
    if (options.joint) rows.push_back({"joint", {Metric::Clone, Metric::Cosine}});

    PrecisionTable table;
    table.tasks = tasks.size();
    table.thresholds = options.thresholds;
    for (const Row& row : rows) {
        for (double t : options.thresholds) {
            AnalysisConfig config = base;
            config.metrics_enabled = row.metrics;
            config.clone_threshold = t;
            config.cosine_threshold = t;

            PrecisionCell cell;
            cell.row = row.name;
            cell.threshold = t;
            for (const EvalTask& task : tasks) {
                const ProvenanceReport report = analyze(task.query, task.links, config, services);
                for (const ProvenanceRecord& record : report.records) {
                    const auto label = labels.find(task.task_id, record.link.url);
                    if (!label) {
                        throw Error(ErrorCode::MissingLabel, "no label for task " + task.task_id + " url " + record.link.url);
                    }
                    ++cell.retained;
                    if (*label == Relevance::HighlyRelevant) ++cell.relevant;
                }
            }
            if (cell.retained > 0) cell.precision = static_cast<double>(cell.relevant) / static_cast<double>(cell.retained);
            cell.avg_links = tasks.empty() ? 0.0 : static_cast<double>(cell.retained) / static_cast<double>(tasks.size());
            table.cells.push_back(std::move(cell));
        }
    }
    return table;
}

namespace {

std::string fixed(double value, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

}  // namespace

std::string render_precision_table_text(const PrecisionTable& table) {
    constexpr std::size_t kWidth = 12;
    const auto pad = [](std::string s, std::size_t width) {
        if (s.size() < width) s.append(width - s.size(), ' ');
        return s;
    };

    std::string out = pad("metric", 8);
    for (double t : table.thresholds) out += pad("t=" + fixed(t, 2), kWidth);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';

    std::vector<std::string> rows;
    for (const PrecisionCell& cell : table.cells) {
        if (std::find(rows.begin(), rows.end(), cell.row) == rows.end()) rows.push_back(cell.row);
    }
    for (const std::string& row : rows) {
        std::string line = pad(row, 8);
        for (double t : table.thresholds) {
            const PrecisionCell* cell = table.find(row, t);
            std::string text = "-";
            if (cell != nullptr && cell->precision) {
                text = fixed(*cell->precision, 2) + " (" + std::to_string(std::llround(cell->avg_links)) + ")";
            }
            line += pad(text, kWidth);
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + '\n';
    }
    out += "tasks: " + std::to_string(table.tasks) + '\n';
    return out;
}

std::string render_precision_table_json(const PrecisionTable& table) {
    nlohmann::ordered_json doc;
    doc["tasks"] = table.tasks;
    doc["thresholds"] = table.thresholds;
    auto cells = nlohmann::ordered_json::array();
    for (const PrecisionCell& cell : table.cells) {
        nlohmann::ordered_json j;
        j["metric"] = cell.row;
        j["threshold"] = cell.threshold;
        j["retained"] = cell.retained;
        j["relevant"] = cell.relevant;
        if (cell.precision) j["precision"] = *cell.precision;
        j["avg_links"] = cell.avg_links;
        cells.push_back(std::move(j));
    }
    doc["cells"] = std::move(cells);
    return doc.dump(2) + "\n";
}

}  // namespace codegenlink
