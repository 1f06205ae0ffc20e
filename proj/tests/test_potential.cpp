#include <catch2/catch_amalgamated.hpp>

#include "ofe/potential.hpp"
#include "support/oracles.hpp"

#include <cmath>

using Catch::Approx;
using namespace ofe;

namespace {
FieldConfiguration static_field(double f_GVm) {
    FieldConfiguration cfg;
    cfg.f_dc = units::gvm_to_au(f_GVm);
    return cfg;
}
} // namespace

TEST_CASE("image clamp point", "[potential]") {
    const MetalModel m = make_metal();
    // z_c = q^2 / (16 pi eps0 |v0|), about 0.027 nm for a 13.5 eV floor
    const double zc_si = oracle::si::e / (16.0 * M_PI * oracle::si::eps0 * 13.5) * 1e9;
    CHECK(units::au_to_nm(m.z_clamp()) == Approx(zc_si).epsilon(1e-9));
    CHECK(units::au_to_nm(m.z_clamp()) == Approx(0.02667).epsilon(2e-3));
}

TEST_CASE("potential is v0 through the metal and the clamp region", "[potential]") {
    const MetalModel m = make_metal();
    const FieldConfiguration cfg = static_field(2.0);
    const double v0 = units::ev_to_au(-13.5);
    CHECK(potential_at(m, cfg, -m.well_width, 0.0) == Approx(v0).epsilon(1e-12));
    CHECK(potential_at(m, cfg, units::nm_to_au(-0.05), 0.0) == Approx(v0).epsilon(1e-12));
    CHECK(potential_at(m, cfg, 0.0, 0.0) == Approx(v0).epsilon(1e-12));
    CHECK(potential_at(m, cfg, 0.9 * m.z_clamp(), 0.0) == Approx(v0).epsilon(1e-12));
    CHECK_THROWS_AS(potential_at(m, cfg, -m.well_width - 1e-6, 0.0), std::domain_error);
}

TEST_CASE("image tail value at 1 nm", "[potential]") {
    const MetalModel m = make_metal();
    const FieldConfiguration none;
    const double v = potential_at(m, none, units::nm_to_au(1.0), 0.0);
    // SI oracle: -q^2/(16 pi eps0 z) at z = 1 nm
    const double v_si = -oracle::si::e / (16.0 * M_PI * oracle::si::eps0 * 1e-9);
    CHECK(units::au_to_ev(v) == Approx(v_si).epsilon(1e-9));
    CHECK(units::au_to_ev(v) == Approx(-0.360).epsilon(1e-3));
    // equivalent statement: q^2/(4 pi eps0) = 1.44 eV nm
    CHECK(-4.0 * units::au_to_ev(v) == Approx(1.440).epsilon(1e-3));
}

TEST_CASE("potential is continuous at the clamp point with zero field", "[potential]") {
    const MetalModel m = make_metal();
    const FieldConfiguration none;
    const double eps = 1e-9;
    const double below = potential_at(m, none, m.z_clamp() - eps, 0.0);
    const double above = potential_at(m, none, m.z_clamp() + eps, 0.0);
    CHECK(std::abs(above - below) < 1e-6 * std::abs(m.v0));
}

TEST_CASE("positive field tilts the barrier down beyond the clamp", "[potential]") {
    const MetalModel m = make_metal();
    const FieldConfiguration cfg = static_field(2.0);
    const FieldConfiguration none;
    const double z = units::nm_to_au(2.0);
    CHECK(potential_at(m, cfg, z, 0.0) ==
          Approx(potential_at(m, none, z, 0.0) - z * cfg.f_dc).epsilon(1e-12));
    // inside the clamp the field is screened
    CHECK(potential_at(m, cfg, 0.5 * m.z_clamp(), 0.0) ==
          potential_at(m, none, 0.5 * m.z_clamp(), 0.0));
}

TEST_CASE("barrier maximum matches the Schottky closed form", "[potential]") {
    const MetalModel m = make_metal();
    const double f = units::gvm_to_au(4.4);
    const BarrierMax b = barrier_maximum(m, f);

    // SI oracle: z* = sqrt(q/(16 pi eps0 F)), V* = -sqrt(q^3 F/(4 pi eps0))
    const double zs_si = std::sqrt(oracle::si::e / (16.0 * M_PI * oracle::si::eps0 * 4.4e9));
    const double vs_si = -std::sqrt(oracle::si::e * 4.4e9 / (4.0 * M_PI * oracle::si::eps0));
    CHECK(units::au_to_nm(b.z) == Approx(zs_si * 1e9).epsilon(1e-9));
    CHECK(units::au_to_ev(b.v) == Approx(vs_si).epsilon(1e-9));
    CHECK(units::au_to_nm(b.z) == Approx(0.286).epsilon(2e-3));
    CHECK(units::au_to_ev(b.v) == Approx(-2.517).epsilon(1e-3));

    // the maximum sits below the vacuum level, well above the Fermi level
    CHECK(b.v < 0.0);
    CHECK(b.v > m.fermi_energy());

    // and it is the actual maximum of the evaluated potential
    const FieldConfiguration cfg = static_field(4.4);
    const double vmax = potential_at(m, cfg, b.z, 0.0);
    for (double z_nm = 0.05; z_nm < 2.0; z_nm += 0.01)
        CHECK(potential_at(m, cfg, units::nm_to_au(z_nm), 0.0) <= vmax + 1e-12);

    CHECK_THROWS_AS(barrier_maximum(m, 0.0), std::domain_error);
    CHECK_THROWS_AS(barrier_maximum(m, -1.0), std::domain_error);
}

TEST_CASE("energy offset shifts the potential rigidly", "[potential]") {
    MetalModel m = make_metal();
    MetalModel shifted = m;
    shifted.energy_offset = units::ev_to_au(3.0);
    const FieldConfiguration cfg = static_field(1.0);
    for (double z_nm : {-0.1, 0.01, 0.4, 3.0, 17.0}) {
        const double z = units::nm_to_au(z_nm);
        CHECK(potential_at(shifted, cfg, z, 0.0) - potential_at(m, cfg, z, 0.0) ==
              Approx(units::ev_to_au(3.0)).epsilon(1e-12));
    }
}

TEST_CASE("disabled image term gives a flat floor", "[potential]") {
    MetalModel m = make_metal();
    m.image_enabled = false;
    const FieldConfiguration none;
    for (double z_nm : {-0.1, 0.1, 1.0, 10.0})
        CHECK(static_potential(m, units::nm_to_au(z_nm)) == Approx(m.v0).epsilon(1e-12));
    // the field tilt still applies beyond the clamp
    const FieldConfiguration cfg = static_field(1.0);
    const double z = units::nm_to_au(5.0);
    CHECK(potential_at(m, cfg, z, 0.0) == Approx(m.v0 - z * cfg.f_dc).epsilon(1e-12));
}

TEST_CASE("metal model validation", "[potential]") {
    CHECK_THROWS_AS(make_metal(13.5, 4.5), std::invalid_argument);
    CHECK_THROWS_AS(make_metal(-13.5, -4.5), std::invalid_argument);
    CHECK_THROWS_AS(make_metal(-4.0, 4.5), std::invalid_argument); // Fermi below floor
    // estimate for the default metal: pi hbar / sqrt(2 m (E_F - v0)) ~ 0.20 nm
    const MetalModel m = make_metal();
    CHECK(units::au_to_nm(m.well_width_estimate()) == Approx(0.2044).epsilon(2e-3));
}
