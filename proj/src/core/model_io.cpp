#include "model_io.hpp"

#include <json.hpp>

#include "errors.hpp"

namespace gestid {

using nlohmann::json;

namespace {

json vec_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// Row-major nested arrays.
json mat_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_to_json(m.row(r).transpose()));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Eigen::MatrixXd mat_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  Eigen::MatrixXd m(rows, cols);
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows) throw DataError("model document: row count mismatch");
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = vec_from_json(data.at(static_cast<std::size_t>(r)));
    if (row.size() != cols) throw DataError("model document: column count mismatch");
    m.row(r) = row.transpose();
  }
  return m;
}

json parse(std::string_view doc, std::string_view type) {
  json j;
  try {
    j = json::parse(doc);
  } catch (const json::exception& e) {
    throw DataError("model document is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object() || j.value("type", "") != type)
    throw DataError("model document is not of type '" + std::string(type) + "'");
  return j;
}

template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DataError("malformed model document: " + std::string(e.what()));
  }
}

}  // namespace

std::string serialize(const NormalizationState& s) {
  return json{{"type", "normalization"},
              {"mean", vec_to_json(s.mean)},
              {"stddev", vec_to_json(s.stddev)},
              {"target_length", s.target_length},
              {"constant_sensors", s.constant_sensors}}
      .dump(1);
}

std::string serialize(const PcaModel& m) {
  return json{{"type", "pca"},
              {"mean", vec_to_json(m.mean)},
              {"components", mat_to_json(m.components)},
              {"eigenvalues", vec_to_json(m.eigenvalues)}}
      .dump(1);
}

std::string serialize(const LdaModel& m) {
  return json{{"type", "lda"},
              {"projection", mat_to_json(m.projection)},
              {"eigenvalues", vec_to_json(m.eigenvalues)},
              {"classes", m.classes},
              {"class_means", mat_to_json(m.class_means)},
              {"projected_means", mat_to_json(m.projected_means)},
              {"used_pseudoinverse", m.used_pseudoinverse}}
      .dump(1);
}

std::string serialize(const KnnModel& m) {
  return json{{"type", "knn"}, {"k", m.k}, {"labels", m.labels}, {"references", mat_to_json(m.references)}}.dump(1);
}

std::string serialize(const SvmModel& m) {
  json machines = json::array();
  for (const auto& b : m.machines)
    machines.push_back({{"negative_class", b.negative_class},
                        {"positive_class", b.positive_class},
                        {"support_vectors", mat_to_json(b.support_vectors)},
                        {"alpha", vec_to_json(b.alpha)},
                        {"coef", vec_to_json(b.coef)},
                        {"bias", b.bias},
                        {"converged", b.converged},
                        {"iterations", b.iterations}});
  return json{{"type", "svm"},
              {"kernel", m.kernel.type == KernelType::rbf ? "rbf" : "linear"},
              {"gamma", m.kernel.gamma},
              {"C", m.c},
              {"classes", m.classes},
              {"machines", machines}}
      .dump(1);
}

NormalizationState deserialize_normalization(std::string_view doc) {
  const auto j = parse(doc, "normalization");
  return guarded([&] {
    NormalizationState s;
    s.mean = vec_from_json(j.at("mean"));
    s.stddev = vec_from_json(j.at("stddev"));
    s.target_length = j.at("target_length").get<int>();
    s.constant_sensors = j.at("constant_sensors").get<std::vector<int>>();
    return s;
  });
}

PcaModel deserialize_pca(std::string_view doc) {
  const auto j = parse(doc, "pca");
  return guarded([&] {
    PcaModel m;
    m.mean = vec_from_json(j.at("mean"));
    m.components = mat_from_json(j.at("components"));
    m.eigenvalues = vec_from_json(j.at("eigenvalues"));
    return m;
  });
}

LdaModel deserialize_lda(std::string_view doc) {
  const auto j = parse(doc, "lda");
  return guarded([&] {
    LdaModel m;
    m.projection = mat_from_json(j.at("projection"));
    m.eigenvalues = vec_from_json(j.at("eigenvalues"));
    m.classes = j.at("classes").get<std::vector<int>>();
    m.class_means = mat_from_json(j.at("class_means"));
    m.projected_means = mat_from_json(j.at("projected_means"));
    m.used_pseudoinverse = j.at("used_pseudoinverse").get<bool>();
    return m;
  });
}

KnnModel deserialize_knn(std::string_view doc) {
  const auto j = parse(doc, "knn");
  return guarded([&] {
    KnnModel m;
    m.k = j.at("k").get<int>();
    m.labels = j.at("labels").get<std::vector<int>>();
    m.references = mat_from_json(j.at("references"));
    return m;
  });
}

SvmModel deserialize_svm(std::string_view doc) {
  const auto j = parse(doc, "svm");
  return guarded([&] {
    SvmModel m;
    m.kernel.type = j.at("kernel").get<std::string>() == "rbf" ? KernelType::rbf : KernelType::linear;
    m.kernel.gamma = j.at("gamma").get<double>();
    m.c = j.at("C").get<double>();
    m.classes = j.at("classes").get<std::vector<int>>();
    for (const auto& b : j.at("machines")) {
      BinaryMachine machine;
      machine.negative_class = b.at("negative_class").get<int>();
      machine.positive_class = b.at("positive_class").get<int>();
      machine.support_vectors = mat_from_json(b.at("support_vectors"));
      machine.alpha = vec_from_json(b.at("alpha"));
      machine.coef = vec_from_json(b.at("coef"));
      machine.bias = b.at("bias").get<double>();
      machine.converged = b.at("converged").get<bool>();
      machine.iterations = b.at("iterations").get<long>();
      m.machines.push_back(std::move(machine));
    }
    return m;
  });
}

}  // namespace gestid
