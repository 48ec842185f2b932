#include "ale/snapshot.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "ale/errors.hpp"

namespace ale {

namespace {

constexpr std::string_view kMagic = "ale-params";
constexpr int kFormatVersion = 1;

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string t; ss >> t;) out.push_back(std::move(t));
    return out;
}

std::string value_after(const std::string& token, std::string_view key) {
    if (token.rfind(std::string(key) + "=", 0) != 0)
        throw ParseError("snapshot spec: expected '" + std::string(key) + "=' in '" + token + "'");
    return token.substr(key.size() + 1);
}

template <class Int>
Int parse_int(std::string_view token) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError("snapshot: bad integer '" + std::string(token) + "'");
    return v;
}

Vocabulary& vocab_for(ModelParams& p, std::string_view kind) {
    if (kind == "student") return p.students;
    if (kind == "course") return p.courses;
    if (kind == "instructor") return p.instructors;
    if (kind == "major") return p.majors;
    if (kind == "subject") return p.subjects;
    throw ParseError("snapshot: unknown vocabulary '" + std::string(kind) + "'");
}

}  // namespace

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw NumericError("cannot format real");
    return std::string(buf, ptr);
}

double parse_real(std::string_view token) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError("bad real '" + std::string(token) + "'");
    return v;
}

void write_snapshot(std::ostream& out, const ModelParams& p) {
    out << kMagic << ' ' << kFormatVersion << '\n';
    out << "spec " << to_string(p.spec.variant) << " al=" << p.spec.use_al << " in=" << p.spec.use_in
        << " g=" << p.spec.use_g << " student_group=" << to_string(p.spec.student_group)
        << " course_group=" << to_string(p.spec.course_group)
        << " ck_normalization=" << to_string(p.spec.ck_normalization) << '\n';
    out << "k " << p.k << '\n';
    out << "seed " << p.seed << '\n';
    out << "decay " << format_real(p.decay) << '\n';
    out << "global_mean " << format_real(p.global_mean) << '\n';

    auto write_vocab = [&](std::string_view kind, const Vocabulary& v) {
        for (std::size_t i = 0; i < v.size(); ++i) out << "vocab " << kind << ' ' << i << ' ' << v.id(i) << '\n';
    };
    write_vocab("student", p.students);
    write_vocab("course", p.courses);
    write_vocab("instructor", p.instructors);
    write_vocab("major", p.majors);
    write_vocab("subject", p.subjects);

    for (std::size_t f = 0; f < kFamilyCount; ++f) {
        const FactorTable& t = p.tables[f];
        if (!t.allocated()) continue;
        const auto name = family_name(static_cast<Family>(f));
        out << "table " << name << ' ' << t.rows << ' ' << t.cols << '\n';
        for (std::size_t r = 0; r < t.rows; ++r) {
            out << name << ' ' << r;
            for (double v : t.row(r)) out << ' ' << format_real(v);
            out << '\n';
        }
    }
}

ModelParams read_snapshot(std::istream& in) {
    ModelParams p;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("snapshot: empty input");
    {
        const auto t = tokens(line);
        if (t.size() != 2 || t[0] != kMagic || parse_int<int>(t[1]) != kFormatVersion)
            throw ParseError("snapshot: bad header '" + line + "'");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = tokens(line);
        if (t.empty()) continue;
        try {
            const std::string& key = t[0];
            if (key == "spec") {
                if (t.size() != 8) throw ParseError("spec line needs 7 fields");
                p.spec.variant = parse_variant(t[1]);
                p.spec.use_al = value_after(t[2], "al") == "1";
                p.spec.use_in = value_after(t[3], "in") == "1";
                p.spec.use_g = value_after(t[4], "g") == "1";
                p.spec.student_group = parse_student_group(value_after(t[5], "student_group"));
                p.spec.course_group = parse_course_group(value_after(t[6], "course_group"));
                p.spec.ck_normalization = parse_ck_normalization(value_after(t[7], "ck_normalization"));
            } else if (key == "k" && t.size() == 2) {
                p.k = parse_int<int>(t[1]);
            } else if (key == "seed" && t.size() == 2) {
                p.seed = parse_int<std::uint64_t>(t[1]);
            } else if (key == "decay" && t.size() == 2) {
                p.decay = parse_real(t[1]);
            } else if (key == "global_mean" && t.size() == 2) {
                p.global_mean = parse_real(t[1]);
            } else if (key == "vocab" && t.size() == 4) {
                Vocabulary& v = vocab_for(p, t[1]);
                if (parse_int<std::size_t>(t[2]) != v.size()) throw ParseError("vocabulary out of order");
                v.add(t[3]);
            } else if (key == "table" && t.size() == 4) {
                FactorTable& table = p.table(parse_family(t[1]));
                table = FactorTable(parse_int<std::size_t>(t[2]), parse_int<std::size_t>(t[3]));
                for (std::size_t r = 0; r < table.rows; ++r) {
                    if (!std::getline(in, line)) throw ParseError("truncated table " + t[1]);
                    ++line_no;
                    const auto row = tokens(line);
                    if (row.size() != table.cols + 2 || row[0] != t[1] || parse_int<std::size_t>(row[1]) != r)
                        throw ParseError("malformed row of table " + t[1]);
                    auto dst = table.row(r);
                    for (std::size_t c = 0; c < table.cols; ++c) dst[c] = parse_real(row[c + 2]);
                }
            } else {
                throw ParseError("unrecognised line");
            }
        } catch (const Error& e) {
            throw ParseError("snapshot line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    for (Family f : required_families(p.spec)) {
        if (!p.has(f)) throw ParseError("snapshot lacks table " + std::string(family_name(f)));
    }
    return p;
}

void save_snapshot(const std::string& path, const ModelParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    write_snapshot(out, params);
}

ModelParams load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_snapshot(in);
}

}  // namespace ale
