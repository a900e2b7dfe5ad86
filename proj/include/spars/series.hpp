#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "spars/errors.hpp"

namespace spars {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;

/// A finite, real-valued sampled signal. Samples are addressed 1-based,
/// matching the conventions used throughout the formulas (x_1, ..., x_N).
class TimeSeries {
public:
    TimeSeries() = default;

    explicit TimeSeries(Vector values, std::string name = "")
        : values_(std::move(values)), name_(std::move(name)) {
        validate();
    }

    TimeSeries(std::initializer_list<double> values, std::string name = "")
        : values_(Eigen::Map<const Vector>(values.begin(),
                                           static_cast<Eigen::Index>(values.size()))),
          name_(std::move(name)) {
        validate();
    }

    static TimeSeries from_vector(const std::vector<double>& v, std::string name = "") {
        return TimeSeries(
            Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())),
            std::move(name));
    }

    Eigen::Index length() const { return values_.size(); }

    /// 1-based sample access: at(1) == x_1, at(length()) == x_N.
    double at(Eigen::Index t) const {
        if (t < 1 || t > values_.size())
            throw RangeError("TimeSeries::at: index " + std::to_string(t) +
                             " outside [1, " + std::to_string(values_.size()) + "]");
        return values_[t - 1];
    }

    const Vector& values() const { return values_; }
    const std::string& name() const { return name_; }

    /// Contiguous subsample x_first..x_last (1-based, inclusive).
    TimeSeries slice(Eigen::Index first, Eigen::Index last) const {
        if (first < 1 || last > values_.size() || first > last)
            throw RangeError("TimeSeries::slice: [" + std::to_string(first) + ", " +
                             std::to_string(last) + "] outside [1, " +
                             std::to_string(values_.size()) + "]");
        return TimeSeries(values_.segment(first - 1, last - first + 1), name_);
    }

private:
    void validate() const {
        if (values_.size() < 1)
            throw RangeError("TimeSeries: length must be >= 1");
        if (!values_.allFinite())
            throw DegenerateInputError("TimeSeries: samples must be finite");
    }

    Vector values_;
    std::string name_;
};

/// The window vector x_L(t) = (x_{t-L+1}, ..., x_t), oldest sample first.
struct WindowVector {
    Vector entries;       // exactly L entries, oldest first
    Eigen::Index t = 0;   // 1-based anchor index
    Eigen::Index lag() const { return entries.size(); }
};

}  // namespace spars
