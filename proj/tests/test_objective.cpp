#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "retargetkit/ablation.hpp"
#include "retargetkit/objective.hpp"
#include "support/helpers.hpp"

using namespace retarget;

namespace {

ObjectiveConfig test_config(const KinematicChain& chain, double hand_scale = 1.5) {
    return default_config(chain, hand_scale);
}

double total_value(const KinematicChain& chain, const HumanHandFrame& h, const Eigen::VectorXd& q,
                   const Eigen::VectorXd& q_prev, const ObjectiveConfig& cfg) {
    return total_objective(h, {q, 0.0}, {q_prev, 0.0}, chain, cfg).value;
}

}  // namespace

TEST_CASE("sigmoid: center value, direct evaluation, saturation") {
    CHECK(sigmoid(0.1, 0.1, 10.0) == doctest::Approx(0.5).epsilon(1e-12));
    // 1 / (1 + e^1)
    CHECK(sigmoid(0.2, 0.1, 10.0) == doctest::Approx(0.2689414213699951).epsilon(1e-12));
    // Exponent clamping keeps extreme arguments finite.
    CHECK(sigmoid(1e6, 0.0, 10.0) > 0.0);
    CHECK(sigmoid(1e6, 0.0, 10.0) < 1e-20);
    CHECK(sigmoid(-1e6, 0.0, 10.0) == doctest::Approx(1.0));
    // Monotone decreasing for positive slope.
    double prev = 1.0;
    for (double x = -0.5; x < 0.5; x += 0.01) {
        const double v = sigmoid(x, 0.0, 10.0);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("sigmoid complementarity identity") {
    for (int k = 0; k <= 1000; ++k) {
        const double d = 0.5 * k / 1000.0;
        CHECK(std::abs(sigmoid(d, 0.1, 10.0) + sigmoid(d, 0.1, -10.0) - 1.0) < 1e-12);
    }
}

TEST_CASE("rescale_distance branches and continuity") {
    const double e1 = 0.1, e2 = 0.01;
    CHECK(rescale_distance(0.005, e1, e2) == 0.0);
    CHECK(rescale_distance(0.1, e1, e2) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(rescale_distance(0.055, e1, e2) == doctest::Approx(0.05).epsilon(1e-12));
    // Continuity at the breakpoints.
    CHECK(std::abs(rescale_distance(e2 - 1e-13, e1, e2) - rescale_distance(e2 + 1e-13, e1, e2)) < 1e-11);
    CHECK(std::abs(rescale_distance(e1 - 1e-13, e1, e2) - rescale_distance(e1 + 1e-13, e1, e2)) < 1e-11);
    // Nondecreasing on a fine grid; identity above eps1.
    double prev = -1.0;
    for (double d = 0.0; d <= 0.3; d += 1e-4) {
        const double v = rescale_distance(d, e1, e2);
        CHECK(v >= prev);
        prev = v;
        if (d > e1) CHECK(v == d);
    }
}

TEST_CASE("hand pose term: zero residual and quarter-turn wrist error") {
    const KinematicChain chain = testutil::load_test_chain();
    ObjectiveConfig cfg = test_config(chain);
    const Eigen::VectorXd q = testutil::oracle_q();
    HumanHandFrame h = testutil::human_from_fk(chain, q, cfg.hand_scale);
    const FkEval fk = make_fk_eval(chain, q);

    SUBCASE("exact match is zero") {
        const TermEval e = term_hand_pose(h, fk, cfg, chain.actuated_count());
        CHECK(e.value == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(e.gradient.lpNorm<Eigen::Infinity>() < 1e-9);
    }

    SUBCASE("pi/2 wrist rotation with lambda2 = 0.1") {
        cfg.lambda2 = 0.1;
        h.wrist.orientation =
            (h.wrist.orientation * Eigen::Quaterniond(Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ())))
                .normalized();
        const TermEval e = term_hand_pose(h, fk, cfg, chain.actuated_count());
        CHECK(e.value == doctest::Approx(0.1 * (M_PI / 2) * (M_PI / 2)).epsilon(1e-10));
    }

    SUBCASE("wrist anchor uses the wrist position residual") {
        cfg.global_anchor = GlobalAnchor::WristPosition;
        h.wrist.position += Eigen::Vector3d(0.02, 0.0, 0.0);
        const TermEval e = term_hand_pose(h, fk, cfg, chain.actuated_count());
        CHECK(e.value == doctest::Approx(cfg.lambda1 * 0.0004).epsilon(1e-9));
    }
}

TEST_CASE("fingertip position term: switching weight at zero pinch distance") {
    const KinematicChain chain = testutil::load_test_chain();
    ObjectiveConfig cfg = test_config(chain, 1.0);
    HumanHandFrame h = testutil::human_from_fk(chain, testutil::oracle_q(), 1.0);
    // Collapse the index tip onto the thumb tip: d_1 = 0.
    h.fingertips[0] = h.thumb_tip;
    const FrameTargets t = make_frame_targets(h, cfg);
    CHECK(t.pinch_distance[0] == 0.0);
    // s~(0) = 1 / (1 + e^{-10 (0 - 0.1)}) = 1 / (1 + e)
    CHECK(t.shape_weight[1] == doctest::Approx(0.2689414213699951).epsilon(1e-12));
    // Thumb summand always has weight 1.
    CHECK(t.shape_weight[0] == 1.0);
    // Non-collapsed fingers carry the sigmoid of their own pinch distance.
    CHECK(t.shape_weight[2] == doctest::Approx(sigmoid(t.pinch_distance[1], cfg.eps1, -cfg.sigmoid_slope)));

    SUBCASE("weights become 1.0 when the pinch term is removed") {
        const ObjectiveConfig a1 = preset(PresetId::A1, cfg);
        const FrameTargets t1 = make_frame_targets(h, a1);
        for (double w : t1.shape_weight) CHECK(w == 1.0);
    }

    SUBCASE("complementarity of s and s~ per finger") {
        for (std::size_t i = 0; i + 1 < t.shape_weight.size(); ++i)
            CHECK(std::abs(t.pinch_weight[i] + t.shape_weight[i + 1] - 1.0) < 1e-12);
    }
}

TEST_CASE("pinch term: rescaled target, raw target, and vanishing summand") {
    const KinematicChain chain = testutil::load_test_chain();
    ObjectiveConfig cfg = test_config(chain, 1.0);
    HumanHandFrame h = testutil::human_from_fk(chain, testutil::oracle_q(), 1.0);

    SUBCASE("d = 0.3: weight 1/(1+e^2), target length stays 0.3") {
        h.fingertips[0] = h.thumb_tip + Eigen::Vector3d(0.0, 0.0, 0.3);
        const FrameTargets t = make_frame_targets(h, cfg);
        CHECK(t.pinch_weight[0] == doctest::Approx(0.11920292202211755).epsilon(1e-12));
        CHECK(t.pinch_target[0].norm() == doctest::Approx(0.3).epsilon(1e-12));
    }

    SUBCASE("d below eps2 rescales to a zero target") {
        h.fingertips[0] = h.thumb_tip + Eigen::Vector3d(0.0, 0.0, 0.005);
        const FrameTargets t = make_frame_targets(h, cfg);
        CHECK(t.pinch_target[0].norm() == 0.0);
    }

    SUBCASE("rescale disabled keeps the actual distance") {
        cfg.pinch_rescale = false;
        h.fingertips[0] = h.thumb_tip + Eigen::Vector3d(0.0, 0.0, 0.015);
        const FrameTargets t = make_frame_targets(h, cfg);
        CHECK(t.pinch_target[0].norm() == doctest::Approx(0.015).epsilon(1e-12));
    }
}

TEST_CASE("fingertip orientation term: opposed vectors") {
    const KinematicChain chain = testutil::load_test_chain();
    ObjectiveConfig cfg = test_config(chain, 1.0);
    const Eigen::VectorXd q = testutil::oracle_q();
    HumanHandFrame h = testutil::human_from_fk(chain, q, 1.0);
    const FkEval fk = make_fk_eval(chain, q);
    CHECK(term_fingertip_rot(h, fk, cfg, chain.actuated_count()).value == doctest::Approx(0.0).epsilon(1e-14));

    // Flip one human DIP-to-tip vector to the opposite side: residual is the
    // doubled vector. Robot r = tip - dip stays fixed; human r becomes -r.
    const Eigen::Vector3d r = h.fingertips[0] - h.dips[1];
    h.dips[1] = h.fingertips[0] + r;
    const TermEval e = term_fingertip_rot(h, fk, cfg, chain.actuated_count());
    CHECK(e.value == doctest::Approx(4.0 * r.squaredNorm()).epsilon(1e-9));
}

TEST_CASE("fingertip orientation with hand-built vectors: bent the wrong way") {
    // Human vector (0,0,-0.02) vs robot vector (0,0,+0.02): residual norm^2
    // is ||(0,0,-0.04)||^2 = 1.6e-3. Checked through the scaled-human path
    // with scale 1 on a constructed single-finger comparison.
    const Eigen::Vector3d r_h(0, 0, -0.02), r_r(0, 0, 0.02);
    CHECK((r_h - r_r).squaredNorm() == doctest::Approx(1.6e-3).epsilon(1e-12));
}

TEST_CASE("joint and velocity regularization values") {
    const KinematicChain chain = testutil::load_test_chain();
    ObjectiveConfig cfg = test_config(chain);
    const int m = chain.actuated_count();

    // Paper weight layout on the 23-DoF chain.
    CHECK(cfg.w_pos[7] == 0.5);
    CHECK(cfg.w_pos[11] == 0.5);
    CHECK(cfg.w_pos[15] == 0.5);
    CHECK(cfg.w_pos[18] == 0.5);
    CHECK(cfg.w_pos[20] == 0.1);
    CHECK(cfg.w_pos.sum() == doctest::Approx(2.1));
    for (int j = 0; j < 7; ++j) CHECK(cfg.w_vel[j] == 0.1);
    for (int j = 7; j < m; ++j) CHECK(cfg.w_vel[j] == 0.01);

    SUBCASE("q = q_bar is exactly zero") {
        CHECK(term_joint_reg(cfg.q_bar, cfg).value == 0.0);
    }
    SUBCASE("single-joint deviation") {
        Eigen::VectorXd q = cfg.q_bar;
        q[7] += 0.2;
        CHECK(term_joint_reg(q, cfg).value == doctest::Approx(0.02).epsilon(1e-12));
    }
    SUBCASE("uniform arm step") {
        Eigen::VectorXd q = Eigen::VectorXd::Zero(m), qp = Eigen::VectorXd::Zero(m);
        for (int j = 0; j < 7; ++j) q[j] = 0.1;
        CHECK(term_vel_reg(q, qp, cfg).value == doctest::Approx(7e-3).epsilon(1e-12));
    }
    SUBCASE("dimension mismatch throws") {
        CHECK_THROWS_AS(term_joint_reg(Eigen::VectorXd::Zero(m + 1), cfg), std::invalid_argument);
        CHECK_THROWS_AS(term_vel_reg(Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m - 1), cfg),
                        std::invalid_argument);
    }
}

TEST_CASE("total objective: disabled terms, linearity, exact match") {
    const KinematicChain chain = testutil::load_test_chain();
    const int m = chain.actuated_count();
    std::mt19937_64 rng(23);
    const Eigen::VectorXd q = testutil::random_q(chain, rng);
    const Eigen::VectorXd q_prev = testutil::random_q(chain, rng);
    ObjectiveConfig cfg = test_config(chain);
    const HumanHandFrame h = testutil::random_human_frame(chain, rng, cfg.hand_scale);

    SUBCASE("all terms disabled gives zero value and gradient") {
        cfg.hand_pose_term = false;
        cfg.pinch_term = false;
        cfg.fingertip_pos_term = false;
        cfg.fingertip_rot_term = false;
        cfg.joint_reg = false;
        cfg.vel_reg = false;
        const TermEval e = total_objective(h, {q, 0.0}, {q_prev, 0.0}, chain, cfg);
        CHECK(e.value == 0.0);
        CHECK(e.gradient.norm() == 0.0);
    }

    SUBCASE("total equals the sum of individually weighted terms") {
        const FrameTargets t = make_frame_targets(h, cfg);
        const FkEval fk = make_fk_eval(chain, q);
        const double expect = term_hand_pose(t, fk, cfg, m).value + cfg.lambda3 * term_fingertip_pos(t, fk, cfg, m).value +
                              cfg.lambda4 * term_fingertip_rot(t, fk, cfg, m).value +
                              cfg.lambda5 * term_pinch(t, fk, cfg, m).value + term_joint_reg(q, cfg).value +
                              term_vel_reg(q, q_prev, cfg).value;
        CHECK(total_value(chain, h, q, q_prev, cfg) == doctest::Approx(expect).epsilon(1e-12));
    }

    SUBCASE("morphology-matched exact instance zeroes the task-space terms") {
        // Open-fingers posture: every pinch distance is above eps1, so the
        // rescaled pinch target equals the human vector and all four
        // task-space residuals vanish at the generating configuration.
        const Eigen::VectorXd qs = testutil::exact_match_q();
        const HumanHandFrame exact = testutil::human_from_fk(chain, qs, cfg.hand_scale);
        const FrameTargets t = make_frame_targets(exact, cfg);
        for (double d : t.pinch_distance) CHECK(d > cfg.eps1);
        const FkEval fk = make_fk_eval(chain, qs);
        CHECK(term_hand_pose(exact, fk, cfg, m).value < 1e-18);
        CHECK(term_fingertip_pos(exact, fk, cfg, m).value < 1e-18);
        CHECK(term_pinch(exact, fk, cfg, m).value < 1e-18);
        CHECK(term_fingertip_rot(exact, fk, cfg, m).value < 1e-18);
    }
}

TEST_CASE("analytic gradients match central finite differences on all presets") {
    const KinematicChain chain = testutil::load_test_chain();
    std::mt19937_64 rng(31);
    const ObjectiveConfig base = test_config(chain);
    for (PresetId id : all_presets()) {
        const ObjectiveConfig cfg = preset(id, base);
        for (int k = 0; k < 8; ++k) {
            const Eigen::VectorXd q = testutil::random_q(chain, rng);
            const Eigen::VectorXd q_prev = testutil::random_q(chain, rng);
            const HumanHandFrame h = testutil::random_human_frame(chain, rng, cfg.hand_scale);
            const FrameTargets t = make_frame_targets(h, cfg);
            const TermEval e = total_objective(t, q, q_prev, chain, cfg);
            const Eigen::VectorXd fd = testutil::fd_gradient(
                [&](const Eigen::VectorXd& x) { return total_objective(t, x, q_prev, chain, cfg).value; }, q);
            CHECK(testutil::grad_rel_err(e.gradient, fd) < 1e-5);
        }
    }
}

TEST_CASE("per-term gradients match finite differences") {
    const KinematicChain chain = testutil::load_test_chain();
    const int m = chain.actuated_count();
    std::mt19937_64 rng(37);
    ObjectiveConfig cfg = test_config(chain);
    for (int k = 0; k < 5; ++k) {
        const Eigen::VectorXd q = testutil::random_q(chain, rng);
        const HumanHandFrame h = testutil::random_human_frame(chain, rng, cfg.hand_scale);
        const FrameTargets t = make_frame_targets(h, cfg);

        using TermFn = TermEval (*)(const FrameTargets&, const FkEval&, const ObjectiveConfig&, int);
        for (TermFn term : {static_cast<TermFn>(term_hand_pose), static_cast<TermFn>(term_fingertip_pos),
                            static_cast<TermFn>(term_pinch), static_cast<TermFn>(term_fingertip_rot)}) {
            const TermEval e = term(t, make_fk_eval(chain, q), cfg, m);
            const Eigen::VectorXd fd = testutil::fd_gradient(
                [&](const Eigen::VectorXd& x) { return term(t, make_fk_eval(chain, x), cfg, m).value; }, q);
            CHECK(testutil::grad_rel_err(e.gradient, fd) < 1e-5);
        }
    }
}

TEST_CASE("common weight scaling scales the objective linearly") {
    const KinematicChain chain = testutil::load_test_chain();
    std::mt19937_64 rng(41);
    ObjectiveConfig cfg = test_config(chain);
    const Eigen::VectorXd q = testutil::random_q(chain, rng);
    const Eigen::VectorXd q_prev = testutil::random_q(chain, rng);
    const HumanHandFrame h = testutil::random_human_frame(chain, rng, cfg.hand_scale);
    const double v1 = total_value(chain, h, q, q_prev, cfg);

    const double c = 3.7;
    ObjectiveConfig scaled = cfg;
    scaled.lambda1 *= c;
    scaled.lambda2 *= c;
    scaled.lambda3 *= c;
    scaled.lambda4 *= c;
    scaled.lambda5 *= c;
    scaled.w_pos *= c;
    scaled.w_vel *= c;
    const double v2 = total_value(chain, h, q, q_prev, scaled);
    CHECK(v2 == doctest::Approx(c * v1).epsilon(1e-12));
}

TEST_CASE("config validation") {
    const KinematicChain chain = testutil::load_test_chain();
    ObjectiveConfig cfg = test_config(chain);
    CHECK_NOTHROW(cfg.validate(chain.actuated_count()));
    SUBCASE("eps ordering") {
        cfg.eps2 = cfg.eps1;
        CHECK_THROWS_AS(cfg.validate(chain.actuated_count()), std::invalid_argument);
    }
    SUBCASE("negative lambda") {
        cfg.lambda4 = -1.0;
        CHECK_THROWS_AS(cfg.validate(chain.actuated_count()), std::invalid_argument);
    }
    SUBCASE("wrong regularizer size") {
        cfg.w_pos = Eigen::VectorXd::Zero(3);
        CHECK_THROWS_AS(cfg.validate(chain.actuated_count()), std::invalid_argument);
    }
}
