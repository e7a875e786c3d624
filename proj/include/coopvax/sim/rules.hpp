#pragma once

#include <cstdint>

// Tuning constants. Per-second rates are converted at kTickRate.
namespace coopvax::sim::rules {

inline constexpr int kTickRate = 20;
inline constexpr std::size_t kMaxPlayers = 4;

inline constexpr double kMaxHealth = 100.0;
inline constexpr double kPlayerSpeedPerTick = 3.0 / kTickRate;

// Virus step length is kVirusBaseStep * (1 + 0.1 * (strain - 1)) * kVirusTickScale cells per tick.
inline constexpr double kVirusBaseStep = 0.4;
inline constexpr double kVirusTickScale = 0.125;
inline constexpr double kAggroRadius = 6.0;
inline constexpr double kContactRadius = 0.6;
inline constexpr double kDamagePerStrain = 5.0;
inline constexpr std::uint64_t kContactCooldownTicks = kTickRate;

inline constexpr double kActionRadius = 1.5;

inline constexpr double kVitaminHeal = 10.0;
inline constexpr double kCampHealPerTick = 5.0 / kTickRate;
inline constexpr int kCampReach = 1;  // Chebyshev distance in cells

inline constexpr double kMaskMeterFull = 100.0;
inline constexpr double kMaskDecayPerTick = 10.0 / kTickRate;
inline constexpr int kSanitizerShieldTicks = 5 * kTickRate;

inline constexpr int kStartingAmmo = 5;
inline constexpr int kRefillAmmo = 3;

inline constexpr int kGoalActionPoints = 10;
inline constexpr int kVaccinePoints = 10;
inline constexpr int kProtectionPickupPoints = 5;
inline constexpr int kRefillPoints = 5;

inline constexpr std::uint64_t kCrowdSpawnPeriodTicks = 15 * kTickRate;
inline constexpr std::uint64_t kTradeTtlTicks = 200;
inline constexpr int kSelfSwapCost = 20;

}  // namespace coopvax::sim::rules
