#include "sohb/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sohb/errors.hpp"

namespace sohb {

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

void append(std::string& s, double x) { s += format_double(x); }

void append_orient(std::string& s, const Mat3& a) {
    s += R"("orient":{"kind":"mat","v":[)";
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i || j) s += ',';
            append(s, a(i, j));
        }
    s += "]}";
}

void append_orient(std::string& s, const UnitQuaternion& q) {
    s += R"("orient":{"kind":"quat","v":[)";
    append(s, q.w);
    s += ',';
    append(s, q.x);
    s += ',';
    append(s, q.y);
    s += ',';
    append(s, q.z);
    s += "]}";
}

template <class Orientation>
void append_record(std::string& s, double t, std::size_t id, const Vec3& x, const Orientation& o) {
    s += R"({"t":)";
    append(s, t);
    s += R"(,"id":)";
    s += std::to_string(id);
    s += R"(,"x":[)";
    append(s, x[0]);
    s += ',';
    append(s, x[1]);
    s += ',';
    append(s, x[2]);
    s += "],";
    append_orient(s, o);
    s += "}\n";
}

}  // namespace

void FrameWriter::commit(const std::string& text) {
    out_.write(text.data(), static_cast<std::streamsize>(text.size()));
    out_.flush();
    if (!out_) throw IoError("failed to write trajectory frame");
    ++frames_;
}

void FrameWriter::write(const ParticleState& state) {
    std::string text;
    text.reserve(state.size() * 200);
    if (const auto* mats = std::get_if<MatrixOrientations>(&state.orientations)) {
        for (std::size_t n = 0; n < state.size(); ++n) append_record(text, state.t, n, state.positions[n], (*mats)[n]);
    } else {
        const auto& quats = std::get<QuaternionOrientations>(state.orientations);
        for (std::size_t n = 0; n < state.size(); ++n) append_record(text, state.t, n, state.positions[n], quats[n]);
    }
    commit(text);
}

void FrameWriter::write_record(double t, std::size_t id, const Vec3& x, const Mat3& a) {
    std::string text;
    append_record(text, t, id, x, a);
    commit(text);
}

void FrameWriter::write_record(double t, std::size_t id, const Vec3& x, const UnitQuaternion& q) {
    std::string text;
    append_record(text, t, id, x, q);
    commit(text);
}

std::vector<FrameRecord> read_frames(std::istream& in) {
    std::vector<FrameRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            FrameRecord r;
            r.t = j.at("t").get<double>();
            r.id = j.at("id").get<std::size_t>();
            const auto& x = j.at("x");
            r.x = Vec3(x.at(0).get<double>(), x.at(1).get<double>(), x.at(2).get<double>());
            r.kind = j.at("orient").at("kind").get<std::string>();
            r.v = j.at("orient").at("v").get<std::vector<double>>();
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("frame line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void write_events(std::ostream& out, const std::vector<JumpEvent>& events, Representation rep) {
    std::string text;
    for (const auto& ev : events) {
        text += R"({"t":)";
        append(text, ev.t);
        text += R"(,"id":)";
        text += std::to_string(ev.particle);
        text += R"(,"degenerate":)";
        text += ev.degenerate ? "true" : "false";
        text += R"(,"orient":{"kind":")";
        text += rep == Representation::Matrix ? "mat" : "quat";
        text += R"(","v":[)";
        for (std::size_t i = 0; i < ev.orientation.size(); ++i) {
            if (i) text += ',';
            append(text, ev.orientation[i]);
        }
        text += "]}}\n";
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError("failed to write event log");
}

std::string constants_csv_header() { return "D,model,c1,c2,c2p,c3,c4"; }

std::string constants_csv_row(const GciConstants& k) {
    std::string s = format_double(k.D);
    s += ',';
    s += to_string(k.model);
    for (double v : {k.c1, k.c2, k.c2_prime, k.c3, k.c4}) {
        s += ',';
        s += format_double(v);
    }
    return s;
}

nlohmann::json constants_json(const GciConstants& k) {
    return {{"D", k.D}, {"model", to_string(k.model)}, {"c1", k.c1}, {"c2", k.c2},
            {"c2p", k.c2_prime}, {"c3", k.c3}, {"c4", k.c4}};
}

void write_macro_csv(std::ostream& out, const MacroField& field, bool header) {
    const bool quat = field.representation() == Representation::Quaternion;
    std::string text;
    if (header) {
        text = "t,i,j,k,x,y,z,rho";
        text += quat ? ",qw,qx,qy,qz\n" : ",r00,r01,r02,r10,r11,r12,r20,r21,r22\n";
    }
    for (std::size_t node = 0; node < field.grid.size(); ++node) {
        const auto c = field.grid.coords(node);
        const Vec3 x = field.grid.position(node);
        append(text, field.t);
        for (int a = 0; a < 3; ++a) text += ',' + std::to_string(c[a]);
        for (int a = 0; a < 3; ++a) {
            text += ',';
            append(text, x[a]);
        }
        text += ',';
        append(text, field.rho[node]);
        if (quat) {
            const auto& q = std::get<QuaternionOrientations>(field.orientation)[node];
            for (double v : {q.w, q.x, q.y, q.z}) {
                text += ',';
                append(text, v);
            }
        } else {
            const auto& a = std::get<MatrixOrientations>(field.orientation)[node];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    text += ',';
                    append(text, a(i, j));
                }
        }
        text += '\n';
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError("failed to write macro snapshot");
}

void write_text_file(const std::string& path, const std::string& text) {
    std::error_code ec;
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace sohb
