#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "collision_norm/errors.hpp"
#include "collision_norm/matrix.hpp"

namespace cnorm {

/// Continuous-time realization ẋ = Ax + Bu, y = Cx + Du with named input
/// and output channels.
class StateSpace {
 public:
  StateSpace(Matrix a, Matrix b, Matrix c, Matrix d,
             std::vector<std::string> input_labels,
             std::vector<std::string> output_labels)
      : a_(std::move(a)),
        b_(std::move(b)),
        c_(std::move(c)),
        d_(std::move(d)),
        inputs_(std::move(input_labels)),
        outputs_(std::move(output_labels)) {
    const std::size_t n = a_.rows();
    if (!a_.is_square()) throw DimensionMismatch("A must be square, got " + a_.shape());
    if (b_.rows() != n) throw DimensionMismatch("B rows != state count");
    if (c_.cols() != n) throw DimensionMismatch("C cols != state count");
    if (d_.rows() != c_.rows() || d_.cols() != b_.cols())
      throw DimensionMismatch("D shape " + d_.shape() + " inconsistent");
    if (inputs_.size() != b_.cols())
      throw DimensionMismatch("input label count != B columns");
    if (outputs_.size() != c_.rows())
      throw DimensionMismatch("output label count != C rows");
    require_unique(inputs_, "input");
    require_unique(outputs_, "output");
  }

  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  const Matrix& c() const { return c_; }
  const Matrix& d() const { return d_; }
  const std::vector<std::string>& input_labels() const { return inputs_; }
  const std::vector<std::string>& output_labels() const { return outputs_; }

  std::size_t states() const { return a_.rows(); }
  std::size_t inputs() const { return b_.cols(); }
  std::size_t outputs() const { return c_.rows(); }

  bool has_input(const std::string& name) const {
    return std::find(inputs_.begin(), inputs_.end(), name) != inputs_.end();
  }
  bool has_output(const std::string& name) const {
    return std::find(outputs_.begin(), outputs_.end(), name) != outputs_.end();
  }

  std::size_t input_index(const std::string& name) const {
    return index_of(inputs_, name, "input");
  }
  std::size_t output_index(const std::string& name) const {
    return index_of(outputs_, name, "output");
  }

  Matrix input_column(const std::string& name) const {
    return b_.col(input_index(name));
  }

  /// Copy with an extra output row y_new = row·x + d_row·u appended.
  StateSpace with_output(const std::string& label, const Matrix& row,
                         const Matrix& d_row) const {
    auto labels = outputs_;
    labels.push_back(label);
    return {a_, b_, vstack(c_, row), vstack(d_, d_row), inputs_, labels};
  }

  StateSpace with_output(const std::string& label, const Matrix& row) const {
    return with_output(label, row, Matrix(1, inputs()));
  }

  /// Copy restricted to the named outputs, in the given order.
  StateSpace select_outputs(const std::vector<std::string>& names) const {
    Matrix c(names.size(), states());
    Matrix d(names.size(), inputs());
    for (std::size_t i = 0; i < names.size(); ++i) {
      const std::size_t k = output_index(names[i]);
      c.set_block(i, 0, c_.row_at(k));
      d.set_block(i, 0, d_.row_at(k));
    }
    return {a_, b_, c, d, inputs_, names};
  }

  /// Copy with C and D scaled by alpha.
  StateSpace scaled_outputs(double alpha) const {
    return {a_, b_, c_ * alpha, d_ * alpha, inputs_, outputs_};
  }

  /// Copy with one input column scaled by alpha.
  StateSpace scaled_input(const std::string& name, double alpha) const {
    const std::size_t j = input_index(name);
    Matrix b = b_;
    Matrix d = d_;
    for (std::size_t i = 0; i < b.rows(); ++i) b(i, j) *= alpha;
    for (std::size_t i = 0; i < d.rows(); ++i) d(i, j) *= alpha;
    return {a_, b, c_, d, inputs_, outputs_};
  }

 private:
  static void require_unique(const std::vector<std::string>& labels,
                             const char* what) {
    std::set<std::string> seen;
    for (const auto& l : labels)
      if (!seen.insert(l).second)
        throw InvalidParams(std::string("duplicate ") + what + " label '" + l + "'");
  }

  static std::size_t index_of(const std::vector<std::string>& labels,
                              const std::string& name, const char* what) {
    auto it = std::find(labels.begin(), labels.end(), name);
    if (it == labels.end())
      throw UnknownChannel(std::string("no ") + what + " channel '" + name + "'");
    return static_cast<std::size_t>(it - labels.begin());
  }

  Matrix a_, b_, c_, d_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

/// Closes u_channel = gain·x. A_cl = A + B_channel·gain; the channel is
/// removed from the inputs. Outputs pick up D_channel·gain, which is zero
/// for every model built here.
inline StateSpace close_state_feedback(const StateSpace& ss, const Matrix& gain,
                                       const std::string& channel) {
  const std::size_t j = ss.input_index(channel);
  if (gain.rows() != 1 || gain.cols() != ss.states())
    throw DimensionMismatch("gain must be 1x" + std::to_string(ss.states()) +
                            ", got " + gain.shape());
  const Matrix bj = ss.b().col(j);
  const Matrix dj = ss.d().col(j);
  const Matrix a_cl = ss.a() + bj * gain;
  const Matrix c_cl = ss.c() + dj * gain;

  const std::size_t m = ss.inputs();
  Matrix b(ss.states(), m - 1);
  Matrix d(ss.outputs(), m - 1);
  std::vector<std::string> labels;
  for (std::size_t k = 0, out = 0; k < m; ++k) {
    if (k == j) continue;
    b.set_block(0, out, ss.b().col(k));
    d.set_block(0, out, ss.d().col(k));
    labels.push_back(ss.input_labels()[k]);
    ++out;
  }
  return {a_cl, b, c_cl, d, labels, ss.output_labels()};
}

}  // namespace cnorm
