#include <stdexcept>
#include <string>

#include "ska/run.hpp"

namespace ska {

namespace {

void check_selection(const Network& net, const UnitSelection& s, std::size_t batch) {
  const auto& sizes = net.config().layer_sizes;
  if (s.layer >= net.layers().size())
    throw std::out_of_range("unit selection: layer " + std::to_string(s.layer) + " but network has " +
                            std::to_string(net.layers().size()) + " layers");
  if (s.unit >= sizes[s.layer + 1])
    throw std::out_of_range("unit selection: unit " + std::to_string(s.unit) + " but layer " +
                            std::to_string(s.layer) + " has " + std::to_string(sizes[s.layer + 1]) +
                            " units");
  if (s.sample >= batch)
    throw std::out_of_range("unit selection: sample " + std::to_string(s.sample) +
                            " but batch has " + std::to_string(batch) + " rows");
}

std::string describe(const data::Dataset& ds, std::size_t batch, data::BatchMode mode) {
  return std::string(data::to_string(ds.source)) + " n=" + std::to_string(ds.size()) +
         " d=" + std::to_string(ds.dim()) + " batch=" + std::to_string(batch) + " " +
         data::to_string(mode);
}

}  // namespace

RunResult run(Network& net, const data::Dataset& ds, const RunOptions& options) {
  const NetworkConfig& cfg = net.config();
  if (ds.dim() != cfg.layer_sizes.front())
    throw std::invalid_argument("dataset dimension " + std::to_string(ds.dim()) +
                                " does not match input size " +
                                std::to_string(cfg.layer_sizes.front()));
  const std::size_t batch = options.batch.size == 0 ? ds.size() : options.batch.size;
  for (const auto& s : options.record_units) check_selection(net, s, batch);

  RunResult result{TrajectoryTrace(cfg, describe(ds, batch, options.batch.mode)), std::nullopt};
  if (!options.record_units.empty()) {
    result.units = UnitRecording{cfg.dt, options.record_units, {},
                                 std::vector<std::vector<double>>(options.record_units.size())};
  }

  auto observe = [&](const StepRecord& rec) {
    result.trace.accumulate(rec, cfg.dt);
    if (!result.units) return;
    result.units->times.push_back(rec.time);
    for (std::size_t i = 0; i < options.record_units.size(); ++i) {
      const auto& s = options.record_units[i];
      result.units->values[i].push_back(rec.layers[s.layer].z(s.sample, s.unit));
    }
  };

  for (std::size_t k = 0; k < cfg.steps; ++k)
    observe(net.step(data::take_batch(ds, batch, options.batch.mode, k), cfg.dt));
  observe(net.forward(data::take_batch(ds, batch, options.batch.mode, cfg.steps)));
  return result;
}

}  // namespace ska
