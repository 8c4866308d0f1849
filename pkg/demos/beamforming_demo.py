"""Limited-feedback beamforming as subspace quantization.

The receiver knows the channel H, computes its right singular plane, and
feeds back the index of the nearest beamforming matrix in a shared
codebook.  The expected aligned energy tr(V^H Q Q^H V) equals
min(s, l_r) minus the codebook's quantization distortion, which turns
the distortion-rate bounds into throughput predictions.  The s = 1,
l_r = 2 sweep is an unequal-dimensional quantizer (planes quantized by
lines).
"""

import grassquant as gq

for l_t, l_r, s in [(4, 1, 1), (4, 2, 1)]:
    print(f"\nl_t={l_t}, l_r={l_r}, s={s}, SNR = 10 (maxmin codebooks)")
    print(
        f"{'bits':>5} {'throughput':>11} {'bound(D)':>9} {'bound(drf)':>11}"
        f" {'tr (mc)':>8} {'tr (1-D)':>9}"
    )
    for r_fb in (2, 4, 6):
        cfg = gq.BeamformingConfig(
            l_t=l_t, l_r=l_r, s=s, rho=10.0, r_fb=r_fb, trials=4000, seed=r_fb,
            design_iters=6,
        )
        row = gq.beamforming_throughput_experiment(cfg).rows[0]
        print(
            f"{r_fb:>5} {row['throughput_mean']:>11.3f} {row['bound_from_distortion']:>9.3f}"
            f" {row['bound_from_drf']:>11.3f} {row['trace_mean']:>8.4f}"
            f" {row['trace_from_distortion']:>9.4f}"
        )

print(
    "\nThe two trace columns estimate the same expectation from independent"
    "\nsample streams; the Monte-Carlo throughput never exceeds the bounds."
)
