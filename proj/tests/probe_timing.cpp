// Scratch timing probe; not part of the test suite.
#include <chrono>
#include <cstdio>

#include "csskit/pipeline.hpp"
#include "csskit/trainer.hpp"

using namespace csskit;
using Clock = std::chrono::steady_clock;

int main() {
  StftConfig stft_cfg;
  NetConfig xt;  // defaults: 3 blocks x 2 layers, dim 48, heads 3, kernel 33
  xt.bins = stft_cfg.bins();

  SimulateRunConfig sim;
  sim.num_samples = 32;
  sim.duration_sec = 1.5;
  sim.stationary_noise_db = -28;
  sim.transient_rate = 0.3;

  const SimDataset data =
      pipeline::procedural_dataset(sim, default_geometry(3), 1234, 32, 16000);

  const SimDataset eval_set =
      pipeline::procedural_dataset(sim, default_geometry(3), 1234, 8, 16000, 1000);
  for (double lr : {1e-4, 3e-4}) {
    auto model = MaskNet::random_init(xt, 1);
    Adam adam;
    TrainerConfig tcfg;
    tcfg.batch_size = 4;
    tcfg.seed = 5;
    tcfg.base_lr = lr;
    tcfg.steps = 100;
    auto t0 = Clock::now();
    for (int chunk = 0; chunk < 4; ++chunk) {
      const TrainResult r = train_stage1(model, adam, data, stft_cfg, tcfg);
      const EvalResult e = evaluate(model, eval_set, OutputMethod::kMasking, stft_cfg);
      std::printf("lr=%g steps=%d loss=%.1f si_snri=%.2f irm=%.2f mask_mse=%.4f (%.0fs)\n",
                  lr, (chunk + 1) * 100, r.curve.back().loss, e.si_snri_db,
                  e.irm_si_snri_db, e.mask_mse_vs_irm,
                  std::chrono::duration<double>(Clock::now() - t0).count());
      std::fflush(stdout);
    }
  }
  return 0;
}
