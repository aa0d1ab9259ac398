// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#include "rlife/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rlife/error.hpp"

namespace rlife {

namespace {

std::string exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

template <typename Derived>
void write_row(std::ostream& out, const Eigen::DenseBase<Derived>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << exact(v(i));
  out << '\n';
}

template <typename Derived>
void write_matrix(std::ostream& out, const char* tag, const Eigen::MatrixBase<Derived>& m) {
  out << tag << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) write_row(out, m.row(r));
}

void write_scaler(std::ostream& out, const char* tag, const MinMaxScaler<double>& s) {
  out << tag << "_min ";
  write_row(out, s.min());
  out << tag << "_max ";
  write_row(out, s.max());
}

const char* estimator_tag(const Estimator& e) {
  if (std::holds_alternative<Mlp<double>>(e)) return "mlp";
  if (std::holds_alternative<Grnn<double>>(e)) return "grnn";
  return "weibull";
}

/// Line reader that keeps the line number for error messages.
class Reader {
public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  /// Next line, split at the first space into key and rest.
  std::pair<std::string, std::string> next(std::string_view expected_key) {
    std::string line;
    if (!csv::read_line(in_, line)) fail("unexpected end of file, expected '" + std::string(expected_key) + "'");
    ++line_;
    const auto sp = line.find(' ');
    std::string key = line.substr(0, sp);
    std::string rest = sp == std::string::npos ? std::string() : line.substr(sp + 1);
    if (key != expected_key) fail("expected '" + std::string(expected_key) + "', got '" + key + "'");
    return {key, rest};
  }

  std::string rest(std::string_view key) { return next(key).second; }

  std::vector<double> numbers(std::string_view text) {
    std::vector<double> out;
    std::istringstream ss{std::string(text)};
    std::string tok;
    while (ss >> tok) out.push_back(csv::parse_number(tok, source_, line_, "value"));
    return out;
  }

  std::vector<double> numbers_for(std::string_view key, std::size_t count) {
    auto v = numbers(rest(key));
    if (v.size() != count) {
      fail("'" + std::string(key) + "' expects " + std::to_string(count) + " values, got " +
           std::to_string(v.size()));
    }
    return v;
  }

  double number(std::string_view key) { return numbers_for(key, 1)[0]; }

  Eigen::Index count(std::string_view key) {
    const double v = number(key);
    if (v < 0 || v != static_cast<double>(static_cast<Eigen::Index>(v))) fail("bad count for '" + std::string(key) + "'");
    return static_cast<Eigen::Index>(v);
  }

  Eigen::MatrixXd matrix(std::string_view key) {
    const auto dims = numbers(rest(key));
    if (dims.size() != 2 || dims[0] < 0 || dims[1] < 0) fail("bad matrix dimensions");
    const auto rows = static_cast<Eigen::Index>(dims[0]);
    const auto cols = static_cast<Eigen::Index>(dims[1]);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      std::string line;
      if (!csv::read_line(in_, line)) fail("unexpected end of file inside matrix");
      ++line_;
      const auto v = numbers(line);
      if (static_cast<Eigen::Index>(v.size()) != cols) fail("matrix row has wrong width");
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[static_cast<std::size_t>(c)];
    }
    return m;
  }

  MinMaxScaler<double> scaler(std::string_view tag, std::size_t n) {
    const auto lo = numbers_for(std::string(tag) + "_min", n);
    const auto hi = numbers_for(std::string(tag) + "_max", n);
    return MinMaxScaler<double>(Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(n)),
                                Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(n)));
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }

private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

}  // namespace

void write_model(std::ostream& out, const TrainedModel& model) {
  out << "rlife-model " << kModelFormatVersion << '\n';
  out << "kind " << to_string(model.spec.kind) << '\n';
  out << "label " << model.spec.label << '\n';
  out << "seed " << model.spec.seed << '\n';
  out << "inputs " << model.input_names.size();
  for (const auto& name : model.input_names) out << ' ' << name;
  out << '\n';
  out << "age_column " << model.age_column << '\n';
  out << "estimator " << estimator_tag(model.estimator) << '\n';
  write_scaler(out, "target", model.normalizer.target);

  if (const auto* m = std::get_if<Mlp<double>>(&model.estimator)) {
    write_scaler(out, "input", model.normalizer.inputs);
    out << "layout " << m->layout.n_inputs << ' ' << m->layout.n_hidden << ' '
        << to_string(m->layout.hidden_transfer) << ' ' << to_string(m->layout.output_transfer) << '\n';
    write_matrix(out, "hidden_weights", m->hidden_weights);
    write_matrix(out, "output_weights", m->output_weights);
  } else if (const auto* g = std::get_if<Grnn<double>>(&model.estimator)) {
    write_scaler(out, "input", model.normalizer.inputs);
    out << "spread " << exact(g->spread) << '\n';
    write_matrix(out, "centers", g->centers);
    write_matrix(out, "targets", g->targets.transpose());
  } else {
    const auto& w = std::get<Weibull<double>>(model.estimator);
    out << "beta " << exact(w.beta) << '\n';
    out << "eta " << exact(w.eta) << '\n';
  }
  out << "end\n";
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write output file " + path.string());
  write_model(out, model);
}

TrainedModel read_model(std::istream& in, const std::string& source) {
  Reader r(in, source);
  const auto version = r.rest("rlife-model");
  if (version != std::to_string(kModelFormatVersion)) r.fail("unsupported model format version '" + version + "'");

  TrainedModel model;
  try {
    model.spec.kind = parse_estimator_kind(r.rest("kind"));
  } catch (const DomainError& e) {
    r.fail(e.what());
  }
  model.spec.label = r.rest("label");
  const auto seed = r.rest("seed");
  model.spec.seed = std::strtoull(seed.c_str(), nullptr, 10);

  {
    std::istringstream ss(r.rest("inputs"));
    std::size_t n = 0;
    if (!(ss >> n)) r.fail("bad input count");
    std::string name;
    while (ss >> name) model.input_names.push_back(name);
    if (model.input_names.size() != n) r.fail("input name count mismatch");
  }
  const auto n_inputs = model.input_names.size();
  model.spec.n_inputs = static_cast<Eigen::Index>(n_inputs);
  model.age_column = r.count("age_column");
  const auto tag = r.rest("estimator");
  model.normalizer.target = r.scaler("target", 1);

  if (tag == "mlp") {
    model.normalizer.inputs = r.scaler("input", n_inputs);
    std::istringstream ss(r.rest("layout"));
    MlpLayout layout;
    std::string hidden, output;
    if (!(ss >> layout.n_inputs >> layout.n_hidden >> hidden >> output)) r.fail("bad layout line");
    try {
      layout.hidden_transfer = parse_transfer(hidden);
      layout.output_transfer = parse_transfer(output);
      layout.validate();
    } catch (const DomainError& e) {
      r.fail(e.what());
    }
    if (layout.n_inputs != static_cast<Eigen::Index>(n_inputs)) r.fail("layout arity disagrees with inputs");
    Mlp<double> m;
    m.layout = layout;
    m.hidden_weights = r.matrix("hidden_weights");
    const Eigen::MatrixXd ow = r.matrix("output_weights");
    if (m.hidden_weights.rows() != layout.n_hidden || m.hidden_weights.cols() != layout.n_inputs + 1 ||
        ow.rows() != 1 || ow.cols() != layout.n_hidden + 1) {
      r.fail("weight shapes disagree with layout");
    }
    m.output_weights = ow.row(0);
    model.spec.n_hidden = layout.n_hidden;
    model.spec.output_transfer = layout.output_transfer;
    model.estimator = std::move(m);
  } else if (tag == "grnn") {
    model.normalizer.inputs = r.scaler("input", n_inputs);
    Grnn<double> g;
    g.spread = r.number("spread");
    if (!(g.spread > 0)) r.fail("spread must be positive");
    g.centers = r.matrix("centers");
    const Eigen::MatrixXd t = r.matrix("targets");
    if (g.centers.cols() != static_cast<Eigen::Index>(n_inputs) || t.rows() != 1 ||
        t.cols() != g.centers.rows() || g.centers.rows() == 0) {
      r.fail("grnn shapes disagree");
    }
    g.targets = t.row(0).transpose();
    model.spec.spread = g.spread;
    model.estimator = std::move(g);
  } else if (tag == "weibull") {
    Weibull<double> w;
    w.beta = r.number("beta");
    w.eta = r.number("eta");
    if (!(w.beta > 0 && w.eta > 0)) r.fail("Weibull parameters must be positive");
    model.estimator = w;
  } else {
    r.fail("unknown estimator '" + tag + "'");
  }
  r.next("end");
  return model;
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open model file " + path.string());
  return read_model(in, path.string());
}

}  // namespace rlife
