#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gclab/errors.hpp"
#include "gclab/propagators.hpp"
#include "gclab/reports.hpp"

namespace gclab {

namespace fs = std::filesystem;

void save_trajectory(const Trajectory& traj, const std::string& directory) {
  traj.validate();
  fs::create_directories(directory);
  nlohmann::json meta;
  meta["schema_version"] = kSchemaVersion;
  meta["grid"] = {{"n_points", traj.grid().size()}, {"half_width", traj.grid().half_width()}};
  meta["potential"] = {{"id", traj.potential.id}, {"amplitude", traj.potential.amplitude}};
  meta["z"] = {traj.z.real(), traj.z.imag()};
  meta["dt"] = traj.dt;
  meta["times"] = traj.times();
  auto& files = meta["snapshots"] = nlohmann::json::array();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "snapshot_%05zu.bin", k);
    write_field_binary(traj.fields[k], (fs::path(directory) / name).string());
    files.push_back(name);
  }
  write_json_atomic((fs::path(directory) / "metadata.json").string(), meta);
}

Trajectory load_trajectory(const std::string& directory) {
  std::ifstream is(fs::path(directory) / "metadata.json");
  if (!is) throw PreconditionError("load_trajectory: no metadata.json in " + directory);
  const nlohmann::json meta = nlohmann::json::parse(is);
  if (meta.at("schema_version").get<int>() != kSchemaVersion) {
    throw PreconditionError("load_trajectory: unsupported schema version");
  }
  Trajectory traj;
  traj.potential = potential_by_id(meta.at("potential").at("id").get<std::string>(),
                                   meta.at("potential").at("amplitude").get<double>());
  traj.z = {meta.at("z").at(0).get<double>(), meta.at("z").at(1).get<double>()};
  traj.dt = meta.at("dt").get<double>();
  const Grid1D grid(meta.at("grid").at("n_points").get<std::size_t>(),
                    meta.at("grid").at("half_width").get<double>());
  for (const auto& name : meta.at("snapshots")) {
    WaveField f = read_field_binary((fs::path(directory) / name.get<std::string>()).string());
    if (!(f.grid() == grid)) throw PreconditionError("load_trajectory: snapshot grid mismatch");
    traj.fields.push_back(std::move(f));
  }
  traj.validate();
  return traj;
}

}  // namespace gclab
