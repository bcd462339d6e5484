#include "gcm/cohort_io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gcm/raster.hpp"

namespace gcm {
namespace {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::filesystem::path& ctx) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw io_error("bad numeric field '" + s + "' in " + ctx.string());
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

void ensure_dirs(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "images", ec);
    if (ec) throw io_error("cannot create directory " + (dir / "images").string() + ": " + ec.message());
}

std::ofstream open_manifest(const std::filesystem::path& dir) {
    std::ofstream out(dir / "manifest.csv", std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + (dir / "manifest.csv").string());
    return out;
}

}  // namespace

void save_cohort(const std::filesystem::path& dir, std::span<const SubjectRecord> records) {
    ensure_dirs(dir);
    std::ofstream manifest = open_manifest(dir);
    manifest << "id,filename,age,bmi,body_fat_pct,split\n";
    for (const SubjectRecord& rec : records) {
        const std::string filename = "images/" + rec.id + ".pgm";
        write_pgm16(dir / filename, rec.image);
        manifest << rec.id << ',' << filename << ',' << format_double(rec.attributes.age) << ','
                 << format_double(rec.attributes.bmi) << ','
                 << format_double(rec.attributes.body_fat_pct) << ',' << to_string(rec.split) << '\n';
    }
    if (!manifest) throw io_error("write failed: " + (dir / "manifest.csv").string());
}

std::vector<SubjectRecord> load_cohort(const std::filesystem::path& dir) {
    const std::filesystem::path manifest_path = dir / "manifest.csv";
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + manifest_path.string());

    std::string line;
    if (!std::getline(in, line)) throw io_error("empty manifest: " + manifest_path.string());
    if (split_csv_line(line) != std::vector<std::string>{"id", "filename", "age", "bmi", "body_fat_pct", "split"}) {
        throw io_error("unexpected manifest header in " + manifest_path.string());
    }

    std::vector<SubjectRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 6) throw io_error("bad manifest row in " + manifest_path.string());
        SubjectRecord rec;
        rec.id = fields[0];
        rec.image = read_pgm16(dir / fields[1]);
        rec.attributes.age = parse_double(fields[2], manifest_path);
        rec.attributes.bmi = parse_double(fields[3], manifest_path);
        rec.attributes.body_fat_pct = parse_double(fields[4], manifest_path);
        rec.split = split_from_string(fields[5]);
        records.push_back(std::move(rec));
    }
    return records;
}

void save_eval_sets(const std::filesystem::path& dir, const EvalSets& sets) {
    ensure_dirs(dir);
    std::ofstream manifest = open_manifest(dir);
    manifest << "id,filename,age,bmi,body_fat_pct,split,role,top_source_id,bottom_source_id\n";

    auto emit = [&](const EvalItem& item, const char* role) {
        const std::string filename = "images/" + item.id + ".pgm";
        write_pgm16(dir / filename, item.image);
        manifest << item.id << ',' << filename << ',';
        if (item.has_attributes) {
            manifest << format_double(item.attributes.age) << ',' << format_double(item.attributes.bmi)
                     << ',' << format_double(item.attributes.body_fat_pct);
        } else {
            manifest << ",,";
        }
        manifest << ",test," << role << ',' << item.top_source_id << ',' << item.bottom_source_id
                 << '\n';
    };

    for (const auto& item : sets.reference) emit(item, "reference");
    for (const auto& item : sets.consistent) emit(item, "consistent");
    for (const auto& item : sets.inconsistent) emit(item, "inconsistent");
    if (!manifest) throw io_error("write failed: " + (dir / "manifest.csv").string());
}

EvalSets load_eval_sets(const std::filesystem::path& dir) {
    const std::filesystem::path manifest_path = dir / "manifest.csv";
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + manifest_path.string());

    std::string line;
    if (!std::getline(in, line)) throw io_error("empty manifest: " + manifest_path.string());
    const auto header = split_csv_line(line);
    if (header != std::vector<std::string>{"id", "filename", "age", "bmi", "body_fat_pct", "split",
                                           "role", "top_source_id", "bottom_source_id"}) {
        throw io_error("unexpected eval-set manifest header in " + manifest_path.string());
    }

    EvalSets sets;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 9) throw io_error("bad manifest row in " + manifest_path.string());
        EvalItem item;
        item.id = fields[0];
        item.image = read_pgm16(dir / fields[1]);
        if (!fields[2].empty()) {
            item.attributes.age = parse_double(fields[2], manifest_path);
            item.attributes.bmi = parse_double(fields[3], manifest_path);
            item.attributes.body_fat_pct = parse_double(fields[4], manifest_path);
            item.has_attributes = true;
        }
        item.top_source_id = fields[7];
        item.bottom_source_id = fields[8];
        const std::string& role = fields[6];
        if (role == "reference") {
            sets.reference.push_back(std::move(item));
        } else if (role == "consistent") {
            sets.consistent.push_back(std::move(item));
        } else if (role == "inconsistent") {
            sets.inconsistent.push_back(std::move(item));
        } else {
            throw io_error("unknown role '" + role + "' in " + manifest_path.string());
        }
    }
    return sets;
}

std::string string_digest(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return string_digest(ss.str());
}

}  // namespace gcm
