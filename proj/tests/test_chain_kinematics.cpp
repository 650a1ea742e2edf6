#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "retargetkit/chain.hpp"
#include "retargetkit/kinematics.hpp"
#include "support/helpers.hpp"

using namespace retarget;

namespace {

// Minimal one-joint chain: revolute about z at the origin, tip at (1,0,0).
KinematicChain single_revolute() {
    JointSpec j;
    j.name = "j0";
    j.type = JointType::Revolute;
    j.parent_link = "base";
    j.child_link = "arm";
    j.axis = Eigen::Vector3d::UnitZ();
    j.lower = -3.0;
    j.upper = 3.0;
    JointSpec tip;
    tip.name = "tip_fixed";
    tip.parent_link = "arm";
    tip.child_link = "tip";
    tip.origin.position = {1.0, 0.0, 0.0};
    // Roles are required by the chain contract; map them onto what exists.
    return KinematicChain::build("single", {j, tip},
                                 {{"wrist", "base"},
                                  {"thumb_tip", "tip"},
                                  {"fingertip_1", "tip"},
                                  {"dip_0", "arm"},
                                  {"dip_1", "arm"}});
}

}  // namespace

TEST_CASE("chain validation rejects bad inputs") {
    JointSpec j;
    j.name = "j0";
    j.type = JointType::Revolute;
    j.parent_link = "base";
    j.child_link = "arm";
    j.axis = {0.0, 0.0, 2.0};  // not unit
    j.lower = -1.0;
    j.upper = 1.0;
    const std::map<std::string, std::string> roles{
        {"wrist", "base"}, {"thumb_tip", "arm"}, {"fingertip_1", "arm"}, {"dip_0", "base"}, {"dip_1", "base"}};
    CHECK_THROWS_AS(KinematicChain::build("c", {j}, roles), std::invalid_argument);

    j.axis = Eigen::Vector3d::UnitZ();
    j.lower = 1.0;
    j.upper = -1.0;  // inverted limits
    CHECK_THROWS_AS(KinematicChain::build("c", {j}, roles), std::invalid_argument);

    j.lower = -1.0;
    j.upper = 1.0;
    CHECK_THROWS_AS(KinematicChain::build("c", {j}, {{"wrist", "nonexistent"}}), std::invalid_argument);

    // Cycle: two joints forming a loop have no root.
    JointSpec a = j, b = j;
    b.name = "j1";
    b.parent_link = "arm";
    b.child_link = "base";
    CHECK_THROWS_AS(KinematicChain::build("c", {a, b}, roles), std::invalid_argument);
}

TEST_CASE("zero configuration stacks fixed origins") {
    const KinematicChain chain = testutil::load_test_chain();
    CHECK(chain.actuated_count() == 23);
    CHECK(chain.finger_count() == 4);
    const auto poses = forward_kinematics(chain, {Eigen::VectorXd::Zero(23), 0.0});
    CHECK((poses.at("wrist").position - Eigen::Vector3d(0, 0, 1.26)).norm() < 1e-12);
    CHECK((poses.at("fingertip_1").position - Eigen::Vector3d(-0.03, 0, 1.423)).norm() < 1e-12);
}

TEST_CASE("quarter turn about z moves x-offset child to y") {
    const KinematicChain chain = single_revolute();
    Eigen::VectorXd q(1);
    q[0] = M_PI / 2;
    const auto poses = forward_kinematics(chain, {q, 0.0});
    CHECK((poses.at("thumb_tip").position - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12);
}

TEST_CASE("fk matches the independent 4x4-transform oracle") {
    const KinematicChain chain = testutil::load_test_chain();

    SUBCASE("frozen values from an external oracle run") {
        // Computed with a standalone numpy homogeneous-transform script.
        const FkResult fk = fk_full(chain, testutil::oracle_q());
        auto pos = [&](const char* role) { return fk.link_pose[chain.role_link(role)].position; };
        CHECK((pos("wrist") - Eigen::Vector3d(0.145222134563441, 0.150709918281794, 1.07206808306913)).norm() < 1e-9);
        CHECK((pos("fingertip_1") - Eigen::Vector3d(0.0923014184915402, 0.25056271008286, 1.15893827248324)).norm() < 1e-9);
        CHECK((pos("fingertip_2") - Eigen::Vector3d(0.119989865575103, 0.264273065226478, 1.16437621050701)).norm() < 1e-9);
        CHECK((pos("fingertip_3") - Eigen::Vector3d(0.151876690328881, 0.259037907808806, 1.15637155410433)).norm() < 1e-9);
        CHECK((pos("thumb_tip") - Eigen::Vector3d(0.0796361127853502, 0.218428476233374, 1.14281664405631)).norm() < 1e-9);
        CHECK((pos("dip_1") - Eigen::Vector3d(0.0985904929218181, 0.22154722834675, 1.16324516956024)).norm() < 1e-9);
        CHECK((pos("dip_0") - Eigen::Vector3d(0.0886789750475606, 0.183676723506327, 1.13200959429679)).norm() < 1e-9);
    }

    SUBCASE("random configurations against the in-test matrix oracle") {
        std::mt19937_64 rng(11);
        for (int k = 0; k < 25; ++k) {
            const Eigen::VectorXd q = testutil::random_q(chain, rng);
            const FkResult fk = fk_full(chain, q);
            for (const auto& role : chain.roles()) {
                const int link = chain.role_link(role);
                const Eigen::Matrix4d T = testutil::oracle_link_transform(chain, q, link);
                CHECK((fk.link_pose[link].position - T.block<3, 1>(0, 3)).norm() < 1e-10);
                CHECK((fk.link_pose[link].orientation.toRotationMatrix() - T.block<3, 3>(0, 0)).norm() < 1e-10);
            }
        }
    }
}

TEST_CASE("fk rejects dimension mismatch") {
    const KinematicChain chain = testutil::load_test_chain();
    CHECK_THROWS_AS(forward_kinematics(chain, {Eigen::VectorXd::Zero(5), 0.0}), std::invalid_argument);
}

TEST_CASE("jacobian: textbook single-joint case") {
    const KinematicChain chain = single_revolute();
    Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
    const Eigen::MatrixXd J = frame_jacobian(chain, {q, 0.0}, "thumb_tip");
    CHECK((J.col(0).head<3>() - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12);
    CHECK((J.col(0).tail<3>() - Eigen::Vector3d(0, 0, 1)).norm() < 1e-12);
}

TEST_CASE("jacobian: off-path columns are exactly zero") {
    const KinematicChain chain = testutil::load_test_chain();
    std::mt19937_64 rng(5);
    const Eigen::VectorXd q = testutil::random_q(chain, rng);
    const Eigen::MatrixXd J = frame_jacobian(chain, {q, 0.0}, "fingertip_1");
    // Middle, ring and thumb joints (11..22 except none) are off the index path.
    for (int a = 11; a < 23; ++a) CHECK(J.col(a).norm() == 0.0);
    // Arm and index joints are on the path.
    for (int a = 0; a < 11; ++a) CHECK(J.col(a).norm() > 0.0);
}

TEST_CASE("jacobian matches finite differences of fk") {
    const KinematicChain chain = testutil::load_test_chain();
    std::mt19937_64 rng(13);
    const double h = 1e-6;
    for (int k = 0; k < 10; ++k) {
        const Eigen::VectorXd q = testutil::random_q(chain, rng);
        for (const auto& role : {"thumb_tip", "fingertip_2", "wrist", "dip_3"}) {
            const Eigen::MatrixXd J = frame_jacobian(chain, {q, 0.0}, role);
            const int link = chain.role_link(role);
            for (int j = 0; j < chain.actuated_count(); ++j) {
                Eigen::VectorXd qp = q, qm = q;
                qp[j] += h;
                qm[j] -= h;
                const Pose pp = fk_full(chain, qp).link_pose[link];
                const Pose pm = fk_full(chain, qm).link_pose[link];
                const Eigen::Vector3d dv = (pp.position - pm.position) / (2 * h);
                CHECK((J.col(j).head<3>() - dv).lpNorm<Eigen::Infinity>() < 1e-5);
                // Angular rows from quaternion differences: omega = 2 * (dq/dt) * q^-1.
                Eigen::Quaterniond dq;
                dq.coeffs() = (pp.orientation.coeffs() - pm.orientation.coeffs()) / (2 * h);
                const Eigen::Quaterniond qc = fk_full(chain, q).link_pose[link].orientation;
                const Eigen::Quaterniond w = dq * qc.conjugate();
                const Eigen::Vector3d omega = 2.0 * w.vec();
                CHECK((J.col(j).tail<3>() - omega).lpNorm<Eigen::Infinity>() < 1e-5);
            }
        }
    }
}

TEST_CASE("fk is invariant to mid-chain quaternion renormalization") {
    // Build the same chain twice, once with slightly denormalized origin
    // quaternions (within the 1e-9 unit tolerance), and compare FK.
    const KinematicChain chain = testutil::load_test_chain();
    std::vector<JointSpec> joints = chain.joints();
    for (auto& j : joints) j.origin.orientation.coeffs() *= (1.0 + 4e-10);
    const KinematicChain chain2 = KinematicChain::build(chain.name(), joints, chain.frame_roles());
    std::mt19937_64 rng(17);
    const Eigen::VectorXd q = testutil::random_q(chain, rng);
    const FkResult a = fk_full(chain, q);
    const FkResult b = fk_full(chain2, q);
    for (int l = 0; l < chain.link_count(); ++l) {
        CHECK((a.link_pose[l].position - b.link_pose[l].position).norm() < 1e-12);
        CHECK(quat_angle(a.link_pose[l].orientation, b.link_pose[l].orientation) < 1e-12);
    }
}
