# macsim - energy-capped multiple-access channel simulator
