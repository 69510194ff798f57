#include "platoon/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

#include "platoon/errors.hpp"

namespace platoon {

namespace {

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_trace(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_field_double(const std::filesystem::path& path, int line_no, const std::string& text) {
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &consumed);
    } catch (const std::exception&) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed number '" + text + "'");
    }
    if (consumed != text.size()) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed number '" + text + "'");
    }
    if (!std::isfinite(value)) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": non-finite value");
    }
    return value;
}

int parse_field_int(const std::filesystem::path& path, int line_no, const std::string& text) {
    std::size_t consumed = 0;
    long value = 0;
    try {
        value = std::stol(text, &consumed);
    } catch (const std::exception&) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed integer '" + text + "'");
    }
    if (consumed != text.size()) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed integer '" + text + "'");
    }
    return static_cast<int>(value);
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

// Lines of a CSV file with 1-based numbering; the header is line 1.
std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(file, line)) lines.push_back(strip_cr(line));
    return lines;
}

}  // namespace

void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) throw IoError("cannot write file: " + tmp.string());
        file << content;
        file.flush();
        if (!file) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename temp file onto " + path.string());
    }
}

LeaderProfile read_leader_profile(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != "k,velocity") {
        throw IoError(path.string() + ":1: expected header 'k,velocity'");
    }
    LeaderProfile profile;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const int line_no = static_cast<int>(r) + 1;
        if (lines[r].empty()) continue;
        const auto fields = split_fields(lines[r]);
        if (fields.size() != 2) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 2 fields");
        }
        const int k = parse_field_int(path, line_no, fields[0]);
        const int expected = static_cast<int>(profile.velocities.size());
        if (k != expected) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": non-contiguous step index " +
                          std::to_string(k) + " (expected " + std::to_string(expected) + ")");
        }
        profile.velocities.push_back(parse_field_double(path, line_no, fields[1]));
    }
    if (profile.velocities.empty()) {
        throw IoError(path.string() + ": leader profile has no samples");
    }
    return profile;
}

void write_leader_profile(const std::filesystem::path& path, const LeaderProfile& profile) {
    std::ostringstream out;
    out << "k,velocity\n";
    for (std::size_t k = 0; k < profile.velocities.size(); ++k) {
        out << k << "," << format_full(profile.velocities[k]) << "\n";
    }
    atomic_write_text(path, out.str());
}

void write_attack_csv(const std::filesystem::path& path, const AttackVector& vector) {
    std::ostringstream out;
    out << "k,delta\n";
    for (std::size_t k = 0; k < vector.deltas.size(); ++k) {
        out << k << "," << format_full(vector.deltas[k]) << "\n";
    }
    atomic_write_text(path, out.str());
}

AttackVector read_attack_csv(const std::filesystem::path& path, int expected_duration) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != "k,delta") {
        throw IoError(path.string() + ":1: expected header 'k,delta'");
    }
    AttackVector vector;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const int line_no = static_cast<int>(r) + 1;
        if (lines[r].empty()) continue;
        const auto fields = split_fields(lines[r]);
        if (fields.size() != 2) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 2 fields");
        }
        const int k = parse_field_int(path, line_no, fields[0]);
        if (k != static_cast<int>(vector.deltas.size())) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": non-contiguous step index");
        }
        vector.deltas.push_back(parse_field_double(path, line_no, fields[1]));
    }
    if (static_cast<int>(vector.deltas.size()) != expected_duration) {
        throw IoError(path.string() + ": attack vector has " + std::to_string(vector.deltas.size()) +
                      " rows, expected " + std::to_string(expected_duration));
    }
    return vector;
}

void write_trace_csv(const std::filesystem::path& path, const SimulationTrace& trace) {
    std::ostringstream out;
    out << "k,vehicle,position,velocity,acceleration,control,gap\n";
    for (int k = 0; k < static_cast<int>(trace.records.size()); ++k) {
        const auto& row = trace.records[static_cast<std::size_t>(k)];
        for (int i = 0; i < static_cast<int>(row.size()); ++i) {
            const StepRecord& rec = row[static_cast<std::size_t>(i)];
            out << k << "," << i << "," << format_trace(rec.state.s) << "," << format_trace(rec.state.v)
                << "," << format_trace(rec.state.a) << "," << format_trace(rec.u) << ",";
            if (i > 0) out << format_trace(rec.gap);
            out << "\n";
        }
    }
    atomic_write_text(path, out.str());
}

SimulationTrace read_trace_csv(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != "k,vehicle,position,velocity,acceleration,control,gap") {
        throw IoError(path.string() + ":1: expected trace header");
    }
    SimulationTrace trace;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const int line_no = static_cast<int>(r) + 1;
        if (lines[r].empty()) continue;
        const auto fields = split_fields(lines[r]);
        if (fields.size() != 7) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 7 fields");
        }
        const int k = parse_field_int(path, line_no, fields[0]);
        const int vehicle = parse_field_int(path, line_no, fields[1]);
        StepRecord rec;
        rec.state.s = parse_field_double(path, line_no, fields[2]);
        rec.state.v = parse_field_double(path, line_no, fields[3]);
        rec.state.a = parse_field_double(path, line_no, fields[4]);
        rec.u = parse_field_double(path, line_no, fields[5]);
        if (vehicle == 0) {
            if (!fields[6].empty()) {
                throw IoError(path.string() + ":" + std::to_string(line_no) +
                              ": leader row must have an empty gap field");
            }
            rec.gap = std::numeric_limits<double>::quiet_NaN();
        } else {
            rec.gap = parse_field_double(path, line_no, fields[6]);
        }
        if (k == static_cast<int>(trace.records.size())) {
            trace.records.emplace_back();
        } else if (k != static_cast<int>(trace.records.size()) - 1) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": non-contiguous step index");
        }
        auto& row = trace.records.back();
        if (vehicle != static_cast<int>(row.size())) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": non-contiguous vehicle index");
        }
        row.push_back(rec);
    }
    if (trace.records.empty()) throw IoError(path.string() + ": trace has no rows");
    const std::size_t vehicles = trace.records.front().size();
    if (vehicles < 2) throw IoError(path.string() + ": trace needs a leader and at least one follower");
    for (const auto& row : trace.records) {
        if (row.size() != vehicles) {
            throw IoError(path.string() + ": inconsistent vehicle count across steps");
        }
    }
    trace.follower_count = static_cast<int>(vehicles) - 1;
    trace.horizon = static_cast<int>(trace.records.size()) - 1;
    return trace;
}

}  // namespace platoon
