# comarr Inference Package
