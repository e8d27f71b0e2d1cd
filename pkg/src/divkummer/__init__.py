"""Division modules, (J,T)-extensions and effective Kummer bounds."""
