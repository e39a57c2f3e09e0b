#include "betreg/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace betreg {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error(path + ": " + e.what());
  }
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  out << text;
}

FiniteSupport space_from_json(const json& j) {
  FiniteSupport space;
  try {
    space.points = j.at("support").get<std::vector<std::vector<double>>>();
    space.weights = j.at("weights").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw io_error(std::string("class file: ") + e.what());
  }
  try {
    validate(space);
  } catch (const std::exception& e) {
    throw io_error(std::string("class file: ") + e.what());
  }
  return space;
}

HypothesisClass class_from_json(const json& j, std::size_t support_size) {
  HypothesisClass cls;
  try {
    for (const auto& row : j.at("hypotheses")) {
      cls.members.push_back(Tabulated{row.get<std::vector<double>>()});
    }
    if (j.contains("star_index") && !j.at("star_index").is_null()) {
      cls.star_index = j.at("star_index").get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw io_error(std::string("class file: ") + e.what());
  }
  for (const auto& m : cls.members) {
    if (std::get<Tabulated>(m).values.size() != support_size) {
      throw io_error("class file: hypothesis size does not match the support");
    }
  }
  try {
    validate(cls);
  } catch (const std::exception& e) {
    throw io_error(std::string("class file: ") + e.what());
  }
  return cls;
}

json class_to_json(const FiniteSupport& space, const HypothesisClass& cls) {
  json j;
  j["support"] = space.points;
  j["weights"] = space.weights;
  json hyps = json::array();
  for (const auto& m : cls.members) {
    const auto* tab = std::get_if<Tabulated>(&m);
    if (tab == nullptr) {
      throw io_error("class file: only tabulated hypotheses serialize");
    }
    hyps.push_back(tab->values);
  }
  j["hypotheses"] = std::move(hyps);
  if (cls.star_index) {
    j["star_index"] = *cls.star_index;
  } else {
    j["star_index"] = nullptr;
  }
  return j;
}

json label_to_json(const LabelModel& model) {
  json j;
  if (const auto* b = std::get_if<Bernoulli>(&model)) {
    j["type"] = "bernoulli";
    j["mean"] = b->mean;
  } else if (const auto* t = std::get_if<ThreePoint>(&model)) {
    j["type"] = "threepoint";
    j["mean"] = t->mean;
    j["offset"] = t->offset;
    j["tail_prob"] = t->tail_prob;
  } else {
    j["type"] = "deterministic";
    j["mean"] = std::get<Deterministic>(model).mean;
  }
  return j;
}

LabelModel label_from_json(const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "bernoulli") return Bernoulli{j.at("mean").get<double>()};
    if (type == "deterministic") return Deterministic{j.at("mean").get<double>()};
    if (type == "threepoint") {
      return ThreePoint{j.at("mean").get<double>(), j.at("offset").get<double>(),
                        j.at("tail_prob").get<double>()};
    }
    throw io_error("instance file: unknown label type " + type);
  } catch (const json::exception& e) {
    throw io_error(std::string("instance file: ") + e.what());
  }
}

}  // namespace

TabulatedClassFile load_class_file(const std::string& path) {
  const json j = read_json(path);
  TabulatedClassFile file;
  file.space = space_from_json(j);
  file.hypothesis_class = class_from_json(j, file.space.points.size());
  return file;
}

void save_class_file(const std::string& path, const FiniteSupport& space,
                     const HypothesisClass& cls) {
  write_text(path, class_to_json(space, cls).dump(2) + "\n");
}

SyntheticInstance load_instance_file(const std::string& path) {
  const json j = read_json(path);
  SyntheticInstance inst;
  inst.space = space_from_json(j);
  inst.hypothesis_class = class_from_json(j, inst.space.points.size());
  if (!j.contains("labels")) throw io_error("instance file: missing labels");
  for (const auto& lj : j.at("labels")) {
    LabelModel model = label_from_json(lj);
    try {
      validate(model);
    } catch (const std::exception& e) {
      throw io_error(std::string("instance file: ") + e.what());
    }
    inst.labels.push_back(std::move(model));
  }
  if (inst.labels.size() != inst.space.points.size()) {
    throw io_error("instance file: labels do not cover the support");
  }
  if (j.contains("seed")) inst.seed = j.at("seed").get<std::uint64_t>();
  if (!inst.hypothesis_class.star_index) {
    throw io_error("instance file: realizable instances need a star index");
  }
  const auto& star = inst.hypothesis_class.members[*inst.hypothesis_class.star_index];
  for (std::size_t k = 0; k < inst.labels.size(); ++k) {
    if (mean(inst.labels[k]) != evaluate_on_support(star, inst.space, k)) {
      throw io_error("instance file: label mean differs from f* at point " +
                     std::to_string(k));
    }
  }
  return inst;
}

void save_instance_file(const std::string& path, const SyntheticInstance& inst) {
  json j = class_to_json(inst.space, inst.hypothesis_class);
  json labels = json::array();
  for (const auto& m : inst.labels) labels.push_back(label_to_json(m));
  j["labels"] = std::move(labels);
  j["seed"] = inst.seed;
  write_text(path, j.dump(2) + "\n");
}

Dataset load_dataset_csv(const std::string& path, const FiniteSupport* space) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header.back() != "y") {
    throw io_error(path + ": header must be x1,...,xd,y");
  }
  const std::size_t dim = header.size() - 1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (header[i] != "x" + std::to_string(i + 1)) {
      throw io_error(path + ": header must be x1,...,xd,y");
    }
  }

  // exact-match index over the support for tabulated evaluation
  std::map<std::vector<double>, std::size_t> index;
  if (space != nullptr) {
    for (std::size_t k = 0; k < space->points.size(); ++k) {
      index.emplace(space->points[k], k);
    }
  }

  auto parse_double = [&](const std::string& cell, std::size_t lineno) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
      throw io_error(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
    }
    return v;
  };

  std::vector<DataPoint> points;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    DataPoint p;
    p.features.reserve(dim);
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      const double v = parse_double(cell, lineno);
      if (col < dim) {
        p.features.push_back(v);
      } else {
        p.y = v;
      }
      ++col;
    }
    if (col != dim + 1) {
      throw io_error(path + ":" + std::to_string(lineno) + ": expected " +
                     std::to_string(dim + 1) + " columns");
    }
    if (space != nullptr) {
      const auto it = index.find(p.features);
      if (it == index.end()) {
        throw io_error(path + ":" + std::to_string(lineno) +
                       ": feature vector is not a support point");
      }
      p.support_index = it->second;
    }
    points.push_back(std::move(p));
  }
  if (points.empty()) throw io_error(path + ": no data rows");
  try {
    return Dataset(std::move(points));
  } catch (const std::exception& e) {
    throw io_error(path + ": " + e.what());
  }
}

void save_dataset_csv(const std::string& path, const Dataset& dataset) {
  std::ostringstream out;
  const std::size_t dim = dataset.feature_dim();
  for (std::size_t i = 0; i < dim; ++i) out << "x" << (i + 1) << ",";
  out << "y\n";
  for (const auto& p : dataset.points()) {
    for (const auto& x : p.features) out << format_double(x) << ",";
    out << format_double(p.y) << "\n";
  }
  write_text(path, out.str());
}

}  // namespace betreg
