#include "outsense/embed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "outsense/error.hpp"
#include "outsense/rng.hpp"

namespace outsense {

std::string_view to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::kDenseGaussian:
      return "dense-gaussian";
    case SketchKind::kRowSubsample:
      return "row-subsample";
    case SketchKind::kColumnBernoulli:
      return "column-bernoulli";
    case SketchKind::kSingleRow:
      return "single-row";
  }
  return "unknown";
}

namespace {

SketchKind parse_kind(std::string_view name) {
  for (SketchKind k : {SketchKind::kDenseGaussian, SketchKind::kRowSubsample,
                       SketchKind::kColumnBernoulli, SketchKind::kSingleRow}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown sketch kind '" + std::string(name) + "'");
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view field) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw InvalidArgument("malformed sketch record field '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

Matrix SketchOperator::dense() const {
  switch (kind_) {
    case SketchKind::kDenseGaussian:
    case SketchKind::kSingleRow:
      return entries_;
    case SketchKind::kRowSubsample: {
      Matrix out = Matrix::Zero(rows_, cols_);
      for (Index i = 0; i < rows_; ++i) out(i, indices_[i]) = 1.0;
      return out;
    }
    case SketchKind::kColumnBernoulli: {
      Matrix out = Matrix::Zero(rows_, cols_);
      for (Index j = 0; j < cols_; ++j) out(indices_[j], j) = 1.0;
      return out;
    }
  }
  return {};
}

Matrix SketchOperator::apply(const Matrix& x) const {
  switch (kind_) {
    case SketchKind::kDenseGaussian:
    case SketchKind::kSingleRow:
      require(x.rows() == cols_, "sketch applied to operand with wrong row count");
      return entries_ * x;
    case SketchKind::kRowSubsample: {
      require(x.rows() == cols_, "row subsampler applied to operand with wrong row count");
      Matrix out(rows_, x.cols());
      for (Index i = 0; i < rows_; ++i) out.row(i) = x.row(indices_[i]);
      return out;
    }
    case SketchKind::kColumnBernoulli: {
      require(x.cols() == rows_, "column sampler applied to operand with wrong column count");
      Matrix out(x.rows(), cols_);
      for (Index j = 0; j < cols_; ++j) out.col(j) = x.col(indices_[j]);
      return out;
    }
  }
  return {};
}

std::string SketchOperator::to_record() const {
  char scale[64];
  std::snprintf(scale, sizeof(scale), "%.17g", scale_);
  return std::string(to_string(kind_)) + "," + std::to_string(rows_) + "," +
         std::to_string(cols_) + "," + std::to_string(seed_) + "," + scale;
}

SketchOperator SketchOperator::from_record(std::string_view record) {
  while (!record.empty() && (record.back() == '\n' || record.back() == '\r')) {
    record.remove_suffix(1);
  }
  const auto fields = split(record, ',');
  if (fields.size() != 5) throw InvalidArgument("sketch record needs 5 fields");
  const SketchKind kind = parse_kind(fields[0]);
  const auto rows = parse_number<Index>(fields[1]);
  const auto cols = parse_number<Index>(fields[2]);
  const auto seed = parse_number<std::uint64_t>(fields[3]);
  const auto scale = parse_number<double>(fields[4]);

  SketchOperator op;
  switch (kind) {
    case SketchKind::kDenseGaussian:
      op = make_gaussian_sketch(rows, cols, seed);
      break;
    case SketchKind::kRowSubsample:
      op = make_row_subsampler(cols, rows, seed);
      break;
    case SketchKind::kColumnBernoulli:
      op = make_column_sampler(rows, scale, seed);
      break;
    case SketchKind::kSingleRow:
      require(rows == 1, "single-row record must have one row");
      op = make_probe_vector(cols, seed);
      break;
  }
  if (op.rows() != rows || op.cols() != cols) {
    throw InvalidArgument("sketch record dimensions do not match regenerated operator");
  }
  return op;
}

bool operator==(const SketchOperator& a, const SketchOperator& b) {
  return a.kind_ == b.kind_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
         a.seed_ == b.seed_ && a.scale_ == b.scale_ && a.indices_ == b.indices_ &&
         a.entries_.rows() == b.entries_.rows() && a.entries_.cols() == b.entries_.cols() &&
         a.entries_ == b.entries_;
}

SketchOperator make_gaussian_sketch(Index rows, Index cols, std::uint64_t seed) {
  require(rows >= 1 && cols >= 1, "gaussian sketch needs positive dimensions");
  SketchOperator op;
  op.kind_ = SketchKind::kDenseGaussian;
  op.rows_ = rows;
  op.cols_ = cols;
  op.seed_ = seed;
  op.scale_ = 1.0 / std::sqrt(static_cast<double>(rows));
  op.entries_.resize(rows, cols);
  CounterRng rng(seed);
  double* data = op.entries_.data();
  for (Index i = 0; i < rows * cols; ++i) data[i] = op.scale_ * rng.normal();
  return op;
}

SketchOperator make_column_sampler(Index n2, double gamma, std::uint64_t seed) {
  require(n2 >= 0, "column sampler needs a nonnegative column count");
  require(gamma >= 0.0 && gamma <= 1.0, "column sampling parameter must lie in [0, 1]");
  SketchOperator op;
  op.kind_ = SketchKind::kColumnBernoulli;
  op.rows_ = n2;
  op.seed_ = seed;
  op.scale_ = gamma;
  for (Index i = 0; i < n2; ++i) {
    if (CounterRng::uniform_at(seed, static_cast<std::uint64_t>(i)) < gamma) {
      op.indices_.push_back(i);
    }
  }
  op.cols_ = static_cast<Index>(op.indices_.size());
  op.degenerate_ = op.indices_.empty();
  return op;
}

SketchOperator make_row_subsampler(Index n1, Index m, std::uint64_t seed) {
  require(m >= 1, "row subsampler needs at least one row");
  require(m <= n1, "row subsampler cannot select more rows than exist");
  std::vector<Index> pool(static_cast<std::size_t>(n1));
  std::iota(pool.begin(), pool.end(), Index{0});
  CounterRng rng(seed);
  for (Index i = 0; i < m; ++i) {
    const auto remaining = static_cast<std::uint64_t>(n1 - i);
    const Index pick = i + static_cast<Index>(rng.below(remaining));
    std::swap(pool[i], pool[pick]);
  }
  SketchOperator op;
  op.kind_ = SketchKind::kRowSubsample;
  op.rows_ = m;
  op.cols_ = n1;
  op.seed_ = seed;
  op.scale_ = 1.0;
  op.indices_.assign(pool.begin(), pool.begin() + m);
  std::sort(op.indices_.begin(), op.indices_.end());
  return op;
}

SketchOperator make_probe_vector(Index m, std::uint64_t seed) {
  require(m >= 1, "probe vector needs positive length");
  SketchOperator op;
  op.kind_ = SketchKind::kSingleRow;
  op.rows_ = 1;
  op.cols_ = m;
  op.seed_ = seed;
  op.scale_ = 1.0;
  op.entries_.resize(1, m);
  CounterRng rng(seed);
  for (Index j = 0; j < m; ++j) op.entries_(0, j) = rng.normal();
  return op;
}

double jl_exponent(double eps) { return eps * eps / 4.0 - eps * eps * eps / 6.0; }

namespace {

void check_delta(double delta) {
  require(delta > 0.0 && delta <= 1.0, "failure probability delta must lie in (0, 1]");
}

Index ceil_count(double x) { return static_cast<Index>(std::ceil(x)); }

}  // namespace

CountBound min_row_budget(const SampleBudget& b) {
  require(b.rank >= 1, "rank must be at least 1");
  require(b.outliers >= 0, "outlier count must be nonnegative");
  check_delta(b.delta);
  const double f = jl_exponent(kBudgetDistortion);
  double numerator = 5.0 * static_cast<double>(b.rank + 1) + std::log(2.0 / b.delta);
  CountBound out;
  if (b.outliers == 0) {
    out.degenerate = true;
  } else {
    numerator += std::log(static_cast<double>(b.outliers));
  }
  out.value = ceil_count(numerator / f);
  return out;
}

Index min_col_budget(const SampleBudget& b) {
  require(b.outliers >= 1, "column budget needs at least one outlier to sense");
  require(b.outliers <= b.n2, "outlier count cannot exceed n2");
  check_delta(b.delta);
  const double k = static_cast<double>(b.outliers);
  const double numerator = 11.0 * k + 2.0 * k * std::log(static_cast<double>(b.n2) / k) +
                           std::log(2.0 / b.delta);
  return ceil_count(numerator / jl_exponent(kBudgetDistortion));
}

RateBound min_gamma(const SampleBudget& b) {
  require(b.rank >= 1, "rank must be at least 1");
  require(b.n_low_rank >= 1 && b.n2 >= 1, "column counts must be positive");
  require(b.incoherence >= 1.0, "incoherence parameter must be at least 1");
  check_delta(b.delta);
  const double n_l = static_cast<double>(b.n_low_rank);
  const double n2 = static_cast<double>(b.n2);
  const double r = static_cast<double>(b.rank);
  const double gamma = std::max({
      1.0 / 20.0,
      200.0 * std::log(5.0 / b.delta) / n_l,
      24.0 * std::log(10.0 / b.delta) / n2,
      10.0 * r * b.incoherence * std::log(5.0 * r / b.delta) / n_l,
  });
  return {gamma, gamma > 1.0};
}

Index max_outliers(const SampleBudget& b) {
  require(b.rank >= 1, "rank must be at least 1");
  require(b.incoherence >= 1.0, "incoherence parameter must be at least 1");
  const double denom = 40.0 * (1.0 + 121.0 * static_cast<double>(b.rank) * b.incoherence);
  return static_cast<Index>(std::floor(static_cast<double>(b.n2) / denom));
}

}  // namespace outsense
