#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gclab/weyl.hpp"

namespace gclab::weyl {

struct IdentityCheck {
  std::string label;
  DiffOp lhs;
  DiffOp rhs;
  bool passed() const { return lhs == rhs; }
};

struct IdentityReport {
  std::string name;
  std::string description;
  std::vector<IdentityCheck> checks;
  bool passed = false;
  DiffOp residual;               // first nonzero lhs - rhs, zero on pass
  std::string first_difference;  // empty on pass

  std::string text() const;
  nlohmann::json json() const;
};

// I1, I2, I3, I4, plus energy-split, I2-specializes-I1, carleman-prefactor.
const std::vector<std::string>& identity_names();
// Throws PreconditionError for an unregistered name.
IdentityReport verify_identity(const std::string& name);

}  // namespace gclab::weyl
