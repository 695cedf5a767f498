// Copyright 2026 The physderiv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "physderiv/controllers.h"

#include <cmath>
#include <set>
#include <string>

#include "physderiv/error.h"

namespace physderiv {

std::string_view PolicyFamilyName(PolicyFamily family) {
  switch (family) {
    case PolicyFamily::kLinearOpenLoop:
      return "linear_openloop";
    case PolicyFamily::kSinusoidal:
      return "sinusoidal";
    case PolicyFamily::kPFeedback:
      return "p_feedback";
    case PolicyFamily::kPdFeedback:
      return "pd_feedback";
  }
  return "unknown";
}

PolicyFamily ParsePolicyFamily(std::string_view name) {
  if (name == "linear_openloop") return PolicyFamily::kLinearOpenLoop;
  if (name == "sinusoidal") return PolicyFamily::kSinusoidal;
  if (name == "p_feedback") return PolicyFamily::kPFeedback;
  if (name == "pd_feedback") return PolicyFamily::kPdFeedback;
  throw Error(ErrorKind::kConfig,
              "unknown policy family '" + std::string(name) + "'");
}

PolicySpec PolicySpec::WithTheta(const Eigen::VectorXd& new_theta) const {
  PolicySpec out = *this;
  out.theta = new_theta;
  return out;
}

void ValidatePolicy(const PolicySpec& policy) {
  const Eigen::Index m = policy.theta.size();
  if (!policy.theta.allFinite()) {
    throw Error(ErrorKind::kConfig, "policy theta is not finite");
  }
  switch (policy.family) {
    case PolicyFamily::kLinearOpenLoop:
      if (m != 6) {
        throw Error(ErrorKind::kConfig, "linear_openloop needs 6 parameters");
      }
      break;
    case PolicyFamily::kSinusoidal: {
      const auto& joints = policy.fixed.joints;
      const Eigen::Index k = static_cast<Eigen::Index>(joints.size());
      if (k == 0) {
        throw Error(ErrorKind::kConfig, "sinusoidal policy drives no joints");
      }
      std::set<int> unique(joints.begin(), joints.end());
      if (static_cast<Eigen::Index>(unique.size()) != k || *unique.begin() < 0 ||
          *unique.rbegin() > 2) {
        throw Error(ErrorKind::kConfig, "sinusoidal joints must be distinct in {0,1,2}");
      }
      if (m == k) {
        if (policy.fixed.amplitudes.size() != k) {
          throw Error(ErrorKind::kConfig,
                      "frequency-only sinusoid needs one fixed amplitude per joint");
        }
      } else if (m != 2 * k) {
        throw Error(ErrorKind::kConfig,
                    "sinusoidal theta must hold k or 2k parameters");
      }
      break;
    }
    case PolicyFamily::kPFeedback:
      if (m != 1) throw Error(ErrorKind::kConfig, "p_feedback needs 1 parameter");
      break;
    case PolicyFamily::kPdFeedback:
      if (m != 1 && m != 2) {
        throw Error(ErrorKind::kConfig, "pd_feedback needs 1 or 2 parameters");
      }
      break;
  }
}

TorqueVector LinearOpenLoop(double time,
                            const Eigen::Ref<const Eigen::VectorXd>& theta) {
  return theta.head<3>() * time + theta.tail<3>();
}

TorqueVector Sinusoidal(int step, const Eigen::Ref<const Eigen::VectorXd>& theta,
                        const PolicyFixed& fixed) {
  const Eigen::Index k = static_cast<Eigen::Index>(fixed.joints.size());
  if (k == 0) throw Error(ErrorKind::kConfig, "sinusoidal policy drives no joints");
  const bool frequency_only = theta.size() == k;
  TorqueVector u = TorqueVector::Zero();
  for (Eigen::Index i = 0; i < k; ++i) {
    const double amplitude = frequency_only ? fixed.amplitudes(i) : theta(i);
    const double omega = frequency_only ? theta(i) : theta(k + i);
    u(fixed.joints[i]) = amplitude * std::sin(omega * step);
  }
  return u;
}

TorqueVector PdFeedback(const JointState& state, double kp, double kd,
                        const Vector3& target) {
  return kp * (target - state.angles) - kd * state.velocities;
}

TorqueVector EvaluatePolicy(const PolicySpec& policy, int step, double time,
                            const JointState& state) {
  TorqueVector u;
  switch (policy.family) {
    case PolicyFamily::kLinearOpenLoop:
      u = LinearOpenLoop(time, policy.theta);
      break;
    case PolicyFamily::kSinusoidal:
      u = Sinusoidal(step, policy.theta, policy.fixed);
      break;
    case PolicyFamily::kPFeedback:
      u = PdFeedback(state, policy.theta(0), 0.0, policy.fixed.target);
      break;
    case PolicyFamily::kPdFeedback: {
      const double kd =
          policy.theta.size() > 1 ? policy.theta(1) : policy.fixed.kd;
      u = PdFeedback(state, policy.theta(0), kd, policy.fixed.target);
      break;
    }
  }
  if (!u.allFinite()) {
    throw Error(ErrorKind::kPolicyEval,
                "non-finite torque at step " + std::to_string(step));
  }
  return u;
}

}  // namespace physderiv
