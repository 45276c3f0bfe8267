/*
 * Copyright 2026 The qcbm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "qcbm/iqp_circuit.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "qcbm/errors.hpp"

namespace qcbm {

namespace {
void check_sizes(int n, int m) {
  if (n < 1) throw std::invalid_argument("IqpCircuit: need at least one visible qubit");
  if (m < 0) throw std::invalid_argument("IqpCircuit: negative hidden count");
  if (n + m > 63) throw SizeCapError("IqpCircuit: too many qubits");
}
}  // namespace

IqpCircuit IqpCircuit::from_generators(int n, int m, std::vector<GeneratorGate> gates) {
  check_sizes(n, m);
  std::unordered_set<std::uint64_t> seen;
  for (const GeneratorGate& g : gates) {
    if (g.mask.width != n + m)
      throw std::invalid_argument("IqpCircuit: gate mask width must equal m+n");
    if (g.mask.bits == 0) throw std::invalid_argument("IqpCircuit: zero gate mask");
    if (!seen.insert(g.mask.bits).second)
      throw std::invalid_argument("IqpCircuit: duplicate gate mask");
  }
  IqpCircuit c;
  c.n_ = n;
  c.m_ = m;
  c.generator_mode_ = true;
  c.gates_ = std::move(gates);
  return c;
}

IqpCircuit IqpCircuit::from_dense(int n, int m, Eigen::VectorXd phases) {
  check_sizes(n, m);
  if (n + m > kMaxDenseDiagonalBits)
    throw SizeCapError("IqpCircuit: dense diagonal requires m+n <= 21");
  if (phases.size() != (Eigen::Index{1} << (n + m)))
    throw std::invalid_argument("IqpCircuit: dense phase table must have 2^(m+n) entries");
  IqpCircuit c;
  c.n_ = n;
  c.m_ = m;
  c.generator_mode_ = false;
  c.dense_phases_ = std::move(phases);
  return c;
}

const std::vector<GeneratorGate>& IqpCircuit::gates() const {
  if (!generator_mode_) throw std::logic_error("IqpCircuit: dense-mode circuit has no gate list");
  return gates_;
}

const Eigen::VectorXd& IqpCircuit::dense_phases() const {
  if (generator_mode_) throw std::logic_error("IqpCircuit: generator-mode circuit has no dense table");
  return dense_phases_;
}

Eigen::VectorXd IqpCircuit::angles() const {
  const auto& gs = gates();
  Eigen::VectorXd theta(static_cast<Eigen::Index>(gs.size()));
  for (std::size_t j = 0; j < gs.size(); ++j) theta[static_cast<Eigen::Index>(j)] = gs[j].angle;
  return theta;
}

void IqpCircuit::set_angles(const Eigen::VectorXd& theta) {
  if (!generator_mode_) throw std::logic_error("IqpCircuit: set_angles needs generator mode");
  if (theta.size() != static_cast<Eigen::Index>(gates_.size()))
    throw std::invalid_argument("IqpCircuit: angle count mismatch");
  for (std::size_t j = 0; j < gates_.size(); ++j) gates_[j].angle = theta[static_cast<Eigen::Index>(j)];
}

void write_circuit(const std::string& path, const IqpCircuit& c) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_circuit: cannot open " + path);
  out << "#iqp-circuit n=" << c.n_visible() << " m=" << c.m_hidden()
      << " mode=" << (c.is_generator_mode() ? "generators" : "dense") << "\n";
  char buf[64];
  if (c.is_generator_mode()) {
    for (const GeneratorGate& g : c.gates()) {
      std::snprintf(buf, sizeof buf, " %.17g\n", g.angle);
      out << to_string(g.mask) << buf;
    }
  } else {
    for (Eigen::Index i = 0; i < c.dense_phases().size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", c.dense_phases()[i]);
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("write_circuit: write failed for " + path);
}

IqpCircuit read_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_circuit: cannot open " + path);
  std::string header;
  if (!std::getline(in, header) || header.rfind("#iqp-circuit ", 0) != 0)
    throw std::runtime_error("read_circuit: missing header in " + path);
  int n = -1, m = -1;
  std::string mode;
  {
    std::istringstream hs(header.substr(13));
    std::string tok;
    while (hs >> tok) {
      if (tok.rfind("n=", 0) == 0) n = std::stoi(tok.substr(2));
      else if (tok.rfind("m=", 0) == 0) m = std::stoi(tok.substr(2));
      else if (tok.rfind("mode=", 0) == 0) mode = tok.substr(5);
    }
  }
  if (n < 0 || m < 0 || (mode != "generators" && mode != "dense"))
    throw std::runtime_error("read_circuit: malformed header in " + path);

  std::string line;
  if (mode == "generators") {
    std::vector<GeneratorGate> gates;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string mask_text;
      double angle;
      if (!(ls >> mask_text >> angle))
        throw std::runtime_error("read_circuit: bad gate line in " + path);
      gates.push_back({bitstring_from_string(mask_text), angle});
    }
    return IqpCircuit::from_generators(n, m, std::move(gates));
  }
  Eigen::VectorXd phases(Eigen::Index{1} << (n + m));
  Eigen::Index i = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (i >= phases.size()) throw std::runtime_error("read_circuit: too many phases in " + path);
    phases[i++] = std::stod(line);
  }
  if (i != phases.size()) throw std::runtime_error("read_circuit: truncated phase table in " + path);
  return IqpCircuit::from_dense(n, m, std::move(phases));
}

}  // namespace qcbm
