#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "sohb/gci.hpp"
#include "sohb/macro.hpp"
#include "sohb/micro.hpp"

namespace sohb {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

/// NDJSON trajectory writer: one line per particle per frame,
/// {"t":…,"id":…,"x":[…],"orient":{"kind":"mat"|"quat","v":[…]}}.
/// Each frame is assembled in memory and written with a single flush.
class FrameWriter {
public:
    explicit FrameWriter(std::ostream& out) : out_(out) {}

    void write(const ParticleState& state);
    /// A single-particle record, used by the single-in-field harness.
    void write_record(double t, std::size_t id, const Vec3& x, const Mat3& a);
    void write_record(double t, std::size_t id, const Vec3& x, const UnitQuaternion& q);
    std::size_t frames() const { return frames_; }

private:
    void commit(const std::string& text);
    std::ostream& out_;
    std::size_t frames_ = 0;
};

struct FrameRecord {
    double t = 0.0;
    std::size_t id = 0;
    Vec3 x = Vec3::Zero();
    std::string kind;
    std::vector<double> v;
};

/// Parses NDJSON written by FrameWriter. Throws ParseError.
std::vector<FrameRecord> read_frames(std::istream& in);

/// {"t":…,"id":…,"degenerate":…,"orient":{…}} per jump event.
void write_events(std::ostream& out, const std::vector<JumpEvent>& events, Representation rep);

std::string constants_csv_header();
std::string constants_csv_row(const GciConstants& k);
nlohmann::json constants_json(const GciConstants& k);

/// Macro snapshot as CSV: t,i,j,k,x,y,z,rho then 9 row-major rotation
/// entries (r00…r22) or 4 quaternion components (qw,qx,qy,qz).
void write_macro_csv(std::ostream& out, const MacroField& field, bool header);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sohb
