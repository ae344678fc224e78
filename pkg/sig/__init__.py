# sig: game rules, player assumptions and computed runs
