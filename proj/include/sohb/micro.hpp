#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "sohb/alignment.hpp"
#include "sohb/rotations.hpp"
#include "sohb/sampling.hpp"

namespace sohb {

enum class Model { Gradual, Jump };
enum class Representation { Matrix, Quaternion };

const char* to_string(Model m);
const char* to_string(Representation r);

using MatrixOrientations = std::vector<Mat3>;
using QuaternionOrientations = std::vector<UnitQuaternion>;
using Orientations = std::variant<MatrixOrientations, QuaternionOrientations>;

/// Positions and orientations of N agents in a periodic box.
///
/// Quaternion signs are stored as produced by the dynamics and never
/// canonicalized. For the jump model `next_jump[n] > t` and `jump_count[n]`
/// counts the orientation updates particle n has made.
struct ParticleState {
    double t = 0.0;
    std::uint64_t step = 0;
    std::vector<Vec3> positions;
    Orientations orientations;
    std::vector<double> next_jump;
    std::vector<std::uint32_t> jump_count;

    std::size_t size() const { return positions.size(); }
    Representation representation() const {
        return std::holds_alternative<MatrixOrientations>(orientations) ? Representation::Matrix
                                                                        : Representation::Quaternion;
    }
    /// Orientation of particle n as a rotation matrix.
    Mat3 rotation(std::size_t n) const;
    /// Direction of motion A_n e1.
    Vec3 heading(std::size_t n) const;
};

struct SimParams {
    std::size_t N = 1;
    double D = 1.0;
    Box box;
    double radius = 1.0;
    KernelShape kernel = KernelShape::Indicator;
    double dt = 1e-2;
    Model model = Model::Gradual;
    Representation representation = Representation::Matrix;
    std::uint64_t seed = 1;
    DegeneracyTolerance tolerance;
    unsigned threads = 0;  // 0: use default_thread_count()

    void validate() const;
};

/// Counters reported in run metadata.
struct RunStats {
    std::uint64_t steps = 0;
    std::uint64_t events = 0;
    std::uint64_t degenerate_targets = 0;
};

enum class InitOrientation { Aligned, Uniform, VonMises };

struct InitSpec {
    InitOrientation orientation = InitOrientation::Uniform;
    Mat3 center = Mat3::Identity();
    double spread_D = 1.0;  // for InitOrientation::VonMises
    std::uint64_t position_seed = 1;
    std::uint64_t orientation_seed = 1;
};

/// Uniform positions in the box; orientations per `init`.
ParticleState make_initial_state(const SimParams& params, const InitSpec& init);

/// One synchronous gradual step on matrix orientations. The noise of particle
/// n at step k is drawn from CounterRng(seed, n, k).
void step_gradual_matrix(ParticleState& state, const SimParams& params, RunStats& stats);
void step_gradual_quat(ParticleState& state, const SimParams& params, RunStats& stats);
/// Dispatches on the state's representation.
void step_gradual(ParticleState& state, const SimParams& params, RunStats& stats);

/// One particle's gradual update toward `target`, shared with the
/// single-particle harness. The overloads taking `dB` use the supplied
/// Brownian increment (entries of variance dt) instead of drawing one.
Mat3 gradual_matrix_update(const Mat3& a, const Mat3& target, double D, double dt, CounterRng& rng);
Mat3 gradual_matrix_update(const Mat3& a, const Mat3& target, double D, double dt, const Mat3& dB);
UnitQuaternion gradual_quat_update(const UnitQuaternion& q, const UnitQuaternion& target, double D, double dt,
                                   CounterRng& rng);
UnitQuaternion gradual_quat_update(const UnitQuaternion& q, const UnitQuaternion& target, double D, double dt,
                                   const Vec4& dB);

struct JumpEvent {
    double t = 0.0;
    std::size_t particle = 0;
    bool degenerate = false;
    std::vector<double> orientation;  // 9 row-major entries or 4 quaternion components
};

/// Draws the first jump time of every particle when `state.next_jump` is empty.
void init_jump_clocks(ParticleState& state, const SimParams& params);

/// Event-driven jump process until t_end. Particle n's m-th jump uses
/// CounterRng(seed, n, m): first the von Mises draw, then the next waiting
/// time. Matrix and quaternion runs with one seed therefore consume identical
/// randomness and stay related by Phi event by event.
void run_jump(ParticleState& state, const SimParams& params, double t_end, RunStats& stats,
              std::vector<JumpEvent>* log = nullptr);

/// Single agent aligning with a constant prescribed field.
struct SingleFieldParams {
    Model model = Model::Jump;
    Representation representation = Representation::Matrix;
    Mat3 field = Mat3::Identity();
    double D = 1.0;
    double dt = 1e-3;  // gradual only
    double t_end = 1.0;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    /// Gradual: record every k-th step. Jump: record every post-jump state.
    std::uint64_t save_every = 1;
};

struct SingleTrajectory {
    std::vector<double> times;
    std::vector<Vec3> positions;
    std::vector<Mat3> orientations;  // Phi-mapped for quaternion runs
    std::vector<UnitQuaternion> quaternions;  // only for quaternion runs
};

/// `initial` is the starting orientation. Pass a VonMises table for D to
/// reuse it across replicas; one is built on demand otherwise.
SingleTrajectory run_single_in_field(const SingleFieldParams& params, const Mat3& initial,
                                     const VonMises* table = nullptr);

/// Final orientation only, without trajectory storage (replica studies).
Mat3 single_in_field_final(const SingleFieldParams& params, const Mat3& initial, const VonMises* table = nullptr);

}  // namespace sohb
