// Hot-path timings: the control-allocation QP alone, one full controller
// tick, and one plant integration step.

#include <benchmark/benchmark.h>

#include "hoverwing/allocation.hpp"
#include "hoverwing/controller.hpp"
#include "hoverwing/scenario.hpp"
#include "hoverwing/simulator.hpp"

namespace {

using namespace hoverwing;

void BM_WlsAllocate(benchmark::State& state) {
  AllocationProblem p;
  p.G << 0.0, 0.0, -1.2e-2, 1.2e-2,
         -2.1e-3, 2.1e-3, 1.0e-4, 1.0e-4,
         -2.0e-3, -2.0e-3, 0.0, 0.0,
         0.0, 0.0, -1.1e-3, -1.1e-3;
  p.dnu = Vec4(1.5, -4.0, 0.8, -2.0);
  p.du_min = Vec4(-9600.0, -9600.0, -3000.0, -3000.0);
  p.du_max = Vec4(9600.0, 9600.0, 6000.0, 6000.0);
  for (auto _ : state) {
    AllocationSolution sol = wls_allocate(p);
    benchmark::DoNotOptimize(sol.du);
  }
}
BENCHMARK(BM_WlsAllocate);

void BM_ControllerTick(benchmark::State& state) {
  const ScenarioSpec spec = preset_scenario("hover");
  Plant plant(spec.setup.plant);
  PlantState init = spec.initial;
  const double hover_u = plant.hover_motor_cmd();
  init.u = Vec4(0.0, 0.0, hover_u, hover_u);
  plant.reset(init);
  SensorSuite sensors(spec.setup.sensors, spec.seed);
  sensors.reset(init);
  Controller ctl(spec.controller, spec.plan);
  const Vec3 wind = Vec3::Zero();

  SensorSnapshot snap = sensors.sense(plant, wind);
  ctl.reset(snap, init.u);
  for (auto _ : state) {
    snap = sensors.sense(plant, wind);
    const Vec4 u_c = ctl.step(snap, nullptr);
    benchmark::DoNotOptimize(u_c);
    plant.step(u_c, wind);
  }
}
BENCHMARK(BM_ControllerTick);

void BM_PlantStep(benchmark::State& state) {
  Plant plant(PlantParams{});
  PlantState init;
  init.pos = Vec3(0.0, 0.0, -30.0);
  const double hover_u = plant.hover_motor_cmd();
  init.u = Vec4(0.0, 0.0, hover_u, hover_u);
  plant.reset(init);
  const Vec4 u_cmd(200.0, -150.0, hover_u * 1.02, hover_u * 0.98);
  const Vec3 wind(1.0, -0.5, 0.2);
  for (auto _ : state) {
    plant.step(u_cmd, wind);
    benchmark::DoNotOptimize(plant.state().vel);
  }
}
BENCHMARK(BM_PlantStep);

}  // namespace

BENCHMARK_MAIN();
